#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "hemd/baselines.hpp"
#include "hemd/io.hpp"
#include "hemd/metrics.hpp"
#include "hemd/pipeline.hpp"
#include "hemd/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

hemd::Connectivity connectivity_from_int(int value) {
    if (value == 4) return hemd::Connectivity::four;
    if (value == 8) return hemd::Connectivity::eight;
    throw hemd::ConfigError("connectivity must be 4 or 8");
}

hemd::GateForm gate_form_from_string(const std::string& name) {
    if (name == "printed") return hemd::GateForm::printed;
    if (name == "symmetric") return hemd::GateForm::symmetric;
    if (name == "asymmetric") return hemd::GateForm::asymmetric;
    throw hemd::ConfigError("unknown gate form: " + name);
}

std::string gate_form_to_string(hemd::GateForm form) {
    switch (form) {
        case hemd::GateForm::symmetric: return "symmetric";
        case hemd::GateForm::asymmetric: return "asymmetric";
        case hemd::GateForm::printed: break;
    }
    return "printed";
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw hemd::IoError("cannot write " + file.string());
    out << text;
}

json report_to_json(const hemd::RunReport& report, const std::string& format) {
    json iterations = json::array();
    for (const hemd::IterationRecord& rec : report.iteration_log) {
        iterations.push_back({{"iteration", rec.iteration},
                              {"newly_selected", rec.newly_selected},
                              {"selected_total", rec.selected_total},
                              {"residual_total", rec.residual_total},
                              {"ilp_problems", rec.ilp_problems},
                              {"ilp_nodes", rec.ilp_nodes}});
    }
    return {
        {"config",
         {{"tau", hemd::to_double(report.config.tau)},
          {"delta", hemd::to_double(report.config.delta)},
          {"iterations", report.config.iterations},
          {"connectivity", static_cast<int>(report.config.connectivity)},
          {"gate_form", gate_form_to_string(report.config.gate_form)},
          {"early_stop", report.config.early_stop},
          {"format", format}}},
        {"frames", report.frames},
        {"iterations_run", report.iterations_run},
        {"reached_fixed_point", report.reached_fixed_point},
        {"iteration_log", iterations},
        {"final_instance_counts", report.final_instance_counts},
        {"totals",
         {{"ilp_problems", report.total_ilp_problems},
          {"ilp_nodes", report.total_ilp_nodes}}}};
}

json problem_to_json(const hemd::MatchProblem& problem) {
    json variables = json::array();
    for (const hemd::MatchVariable& var : problem.variables) {
        variables.push_back(
            {{"ref", var.ref_id},
             {"target", var.target_id},
             {"score", hemd::to_double(var.score)},
             {"score_num", numerator(var.score).str()},
             {"score_den", denominator(var.score).str()}});
    }
    return {{"kind", problem.kind == hemd::MatchKind::emd ? "emd" : "hemd"},
            {"variables", variables},
            {"rows", problem.rows}};
}

int cmd_segment(const std::string& in_dir, const std::string& out_dir,
                const std::string& tau, const std::string& delta, int iters,
                int connectivity, const std::string& format_name,
                std::string report_path, bool dump_ilp, int threads,
                const std::string& gate_form, bool no_early_stop) {
    const hemd::FrameFormat format =
        hemd::frame_format_from_string(format_name);
    hemd::PipelineConfig cfg;
    cfg.tau = hemd::parse_decimal(tau);
    cfg.delta = hemd::parse_decimal(delta);
    cfg.iterations = iters;
    cfg.connectivity = connectivity_from_int(connectivity);
    cfg.gate_form = gate_form_from_string(gate_form);
    cfg.early_stop = !no_early_stop;
    cfg.threads = threads;
    cfg.collect_problems = dump_ilp;
    if (cfg.tau < 0 || cfg.tau > 1) throw hemd::ConfigError("tau must be in [0,1]");
    if (cfg.delta < 0) throw hemd::ConfigError("delta must be non-negative");
    if (cfg.iterations < 0) throw hemd::ConfigError("iters must be >= 0");

    const hemd::Sequence seq = hemd::load_sequence(in_dir, format);
    hemd::RunReport report;
    const auto labels = hemd::run(seq, cfg, &report);
    hemd::save_labels(labels, out_dir);

    if (report_path.empty()) {
        report_path = (fs::path(out_dir) / "report.json").string();
    }
    write_text(report_path, report_to_json(report, format_name).dump(2) + "\n");

    if (dump_ilp) {
        json problems = json::array();
        for (const hemd::MatchProblem& problem : report.problems) {
            problems.push_back(problem_to_json(problem));
        }
        write_text(fs::path(out_dir) / "ilp_dump.json",
                   problems.dump(2) + "\n");
    }
    std::cerr << "segment: " << report.frames << " frames, "
              << report.iterations_run << " iterations"
              << (report.reached_fixed_point ? " (fixed point)" : "") << "\n";
    return 0;
}

std::vector<std::vector<hemd::Region>> label_dir_regions(
    const std::string& dir) {
    std::vector<std::vector<hemd::Region>> families;
    for (const auto& grid : hemd::load_label_grids(dir)) {
        families.push_back(hemd::regions_from_label_grid(grid));
    }
    return families;
}

int cmd_eval(const std::string& pred_dir, const std::string& gt_dir,
             const std::string& method, const std::string& format_name,
             const std::string& boundary_dir, const std::string& bg_dir,
             int connectivity) {
    const hemd::Connectivity conn = connectivity_from_int(connectivity);
    const auto gt = label_dir_regions(gt_dir);

    std::vector<std::vector<hemd::Region>> pred;
    if (method == "hemd") {
        pred = label_dir_regions(pred_dir);
    } else {
        const hemd::FrameFormat format =
            hemd::frame_format_from_string(format_name);
        const hemd::Sequence seq = hemd::load_sequence(pred_dir, format);
        if (method == "th05") {
            for (const hemd::ProbMap& frame : seq.frames()) {
                pred.push_back(hemd::threshold_components(frame, 0.5, conn));
            }
        } else if (method == "otsu") {
            for (const hemd::ProbMap& frame : seq.frames()) {
                pred.push_back(hemd::threshold_components(
                    frame, hemd::otsu_threshold(frame), conn));
            }
        } else if (method == "maxvalue") {
            if (boundary_dir.empty() || bg_dir.empty()) {
                throw hemd::ConfigError(
                    "--method maxvalue needs --boundary and --background");
            }
            const hemd::Sequence boundary =
                hemd::load_sequence(boundary_dir, format);
            const hemd::Sequence bg = hemd::load_sequence(bg_dir, format);
            if (boundary.frame_count() != seq.frame_count() ||
                bg.frame_count() != seq.frame_count()) {
                throw hemd::ShapeError("class map frame counts differ");
            }
            for (int w = 0; w < seq.frame_count(); ++w) {
                pred.push_back(hemd::max_value_components(
                    seq.frame(w), boundary.frame(w), bg.frame(w), conn));
            }
        } else {
            throw hemd::ConfigError("unknown method: " + method);
        }
    }

    if (pred.size() != gt.size()) {
        throw hemd::ShapeError("prediction and ground truth frame counts differ");
    }

    json frames = json::array();
    hemd::Fraction f1_sum, aji_sum;
    for (std::size_t w = 0; w < gt.size(); ++w) {
        const hemd::Fraction f1 = hemd::f1_score(gt[w], pred[w]);
        const hemd::Fraction aji = hemd::aji_score(gt[w], pred[w]);
        f1_sum += f1;
        aji_sum += aji;
        frames.push_back({{"frame", w},
                          {"instances", pred[w].size()},
                          {"gt_instances", gt[w].size()},
                          {"f1", hemd::to_double(f1)},
                          {"aji", hemd::to_double(aji)}});
    }
    const auto count = static_cast<int>(gt.size());
    const json out = {{"method", method},
                      {"frames", frames},
                      {"mean_f1", hemd::to_double(f1_sum / count)},
                      {"mean_aji", hemd::to_double(aji_sum / count)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_inspect_forest(const std::string& in_file, const std::string& tau,
                       int connectivity, const std::string& format_name) {
    const hemd::FrameFormat format =
        hemd::frame_format_from_string(format_name);
    hemd::Grid2D<double> raw;
    if (format == hemd::FrameFormat::pgm16) {
        const auto pixels = hemd::read_pgm16(in_file);
        raw = hemd::Grid2D<double>(pixels.height, pixels.width, 0.0);
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            raw.values[i] = pixels.values[i] / 65535.0;
        }
    } else {
        const auto pixels = hemd::read_rawf32(in_file);
        raw = hemd::Grid2D<double>(pixels.height, pixels.width, 0.0);
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            raw.values[i] = static_cast<double>(pixels.values[i]);
        }
    }
    const hemd::ProbMap map = hemd::quantize(raw);
    const hemd::Fraction tau_fraction = hemd::parse_decimal(tau);
    const hemd::CandidateForest forest = hemd::build_forest_level(
        map, hemd::prob_to_level(tau_fraction),
        connectivity_from_int(connectivity));

    json nodes = json::array();
    std::map<std::string, int> per_threshold;
    for (const hemd::CandidateNode& node : forest.nodes()) {
        json entry = {{"id", node.id},
                      {"threshold", node.threshold()},
                      {"size", node.region.size()},
                      {"children", node.children}};
        if (node.parent == -1) {
            entry["parent"] = nullptr;
        } else {
            entry["parent"] = node.parent;
        }
        nodes.push_back(std::move(entry));
        char key[16];
        std::snprintf(key, sizeof(key), "%.2f", node.threshold());
        ++per_threshold[key];
    }
    const json out = {{"height", map.height()},
                      {"width", map.width()},
                      {"tau", hemd::to_double(tau_fraction)},
                      {"connectivity", connectivity},
                      {"node_count", forest.size()},
                      {"nodes", nodes},
                      {"roots", forest.roots()},
                      {"leaves", forest.leaves()},
                      {"single_path_roots", hemd::single_path_roots(forest)},
                      {"nodes_per_threshold", per_threshold}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_synth(const std::string& scenario_file, const std::string& out_dir) {
    std::ifstream in(scenario_file);
    if (!in) throw hemd::IoError("cannot open " + scenario_file);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw hemd::ConfigError(std::string("bad scenario JSON: ") + e.what());
    }
    const hemd::Scenario scenario = hemd::scenario_from_json(doc);
    const hemd::RenderResult result = hemd::render(scenario);

    const fs::path out(out_dir);
    hemd::save_sequence(result.sequence, out / "probmaps",
                        hemd::FrameFormat::pgm16);
    std::vector<hemd::LabelMap> gt_labels;
    for (const auto& regions : result.ground_truth) {
        gt_labels.push_back(hemd::label_map_from_regions(
            regions, scenario.height, scenario.width));
    }
    hemd::save_labels(gt_labels, out / "gt");
    std::cerr << "synth: wrote " << scenario.frames << " frames to "
              << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Instance segmentation post-processing for probability-map "
                 "sequences: candidate forests, iterative matching-based "
                 "selection, baselines and metrics"};
    app.require_subcommand(1);

    // segment
    std::string seg_in, seg_out, seg_report;
    std::string seg_tau = "0.50", seg_delta = "0.35", seg_format = "pgm16";
    std::string seg_gate = "printed";
    int seg_iters = 10, seg_conn = 8, seg_threads = 0;
    bool seg_dump_ilp = false, seg_no_early_stop = false;
    CLI::App* segment = app.add_subcommand(
        "segment", "Convert a probability-map sequence into instance labels");
    segment->add_option("--in", seg_in, "input frame directory")->required();
    segment->add_option("--out", seg_out, "output label directory")->required();
    segment->add_option("--tau", seg_tau, "lowest candidate threshold");
    segment->add_option("--delta", seg_delta, "size-change gate");
    segment->add_option("--iters", seg_iters, "matching iteration cap");
    segment->add_option("--connectivity", seg_conn, "4 or 8");
    segment->add_option("--format", seg_format, "pgm16|rawf32");
    segment->add_option("--report", seg_report,
                        "report path (default <out>/report.json)");
    segment->add_option("--threads", seg_threads,
                        "worker cap, 0 = all cores");
    segment->add_option("--gate-form", seg_gate,
                        "printed|symmetric|asymmetric");
    segment->add_flag("--dump-ilp", seg_dump_ilp,
                      "write every matching program to <out>/ilp_dump.json");
    segment->add_flag("--no-early-stop", seg_no_early_stop,
                      "always run the full iteration cap");

    // eval
    std::string eval_pred, eval_gt, eval_method = "hemd";
    std::string eval_format = "pgm16", eval_boundary, eval_bg;
    int eval_conn = 8;
    CLI::App* eval = app.add_subcommand(
        "eval", "Score predictions (or a baseline) against ground truth");
    eval->add_option("--pred", eval_pred,
                     "label dir (hemd) or probability dir (baselines)")
        ->required();
    eval->add_option("--gt", eval_gt, "ground-truth label directory")
        ->required();
    eval->add_option("--method", eval_method, "hemd|th05|otsu|maxvalue");
    eval->add_option("--format", eval_format,
                     "probability input format for baselines");
    eval->add_option("--boundary", eval_boundary,
                     "boundary-class probability dir (maxvalue)");
    eval->add_option("--background", eval_bg,
                     "background-class probability dir (maxvalue)");
    eval->add_option("--connectivity", eval_conn, "4 or 8");

    // inspect-forest
    std::string inspect_in, inspect_tau = "0.50", inspect_format = "pgm16";
    int inspect_conn = 8;
    CLI::App* inspect = app.add_subcommand(
        "inspect-forest", "Dump one frame's candidate forest as JSON");
    inspect->add_option("--in", inspect_in, "frame file")->required();
    inspect->add_option("--tau", inspect_tau, "lowest candidate threshold");
    inspect->add_option("--connectivity", inspect_conn, "4 or 8");
    inspect->add_option("--format", inspect_format, "pgm16|rawf32");

    // synth
    std::string synth_scenario, synth_out;
    CLI::App* synth = app.add_subcommand(
        "synth", "Render a scripted scenario to frames plus ground truth");
    synth->add_option("--scenario", synth_scenario, "scenario JSON file")
        ->required();
    synth->add_option("--out", synth_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (segment->parsed()) {
            return cmd_segment(seg_in, seg_out, seg_tau, seg_delta, seg_iters,
                               seg_conn, seg_format, seg_report, seg_dump_ilp,
                               seg_threads, seg_gate, seg_no_early_stop);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_pred, eval_gt, eval_method, eval_format,
                            eval_boundary, eval_bg, eval_conn);
        }
        if (inspect->parsed()) {
            return cmd_inspect_forest(inspect_in, inspect_tau, inspect_conn,
                                      inspect_format);
        }
        if (synth->parsed()) {
            return cmd_synth(synth_scenario, synth_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
