// Batch front end: ground-truth rendering, dataset filtering, and
// evaluation over layered ray-intersection maps.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lari/lari.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json error_json(const lari::Error& error) {
    return json{{"code", lari::error_code_name(error.code())}, {"message", error.what()}};
}

std::vector<lari::ViewSpec> load_view_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lari::Error(lari::ErrorCode::IoError, "cannot open " + path);
    std::vector<lari::ViewSpec> views;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw lari::Error(lari::ErrorCode::ParseError,
                              path + ":" + std::to_string(line_number) + ": " + e.what());
        }
        lari::ViewSpec view;
        view.elevation_deg = record.value("elevation", 0.0);
        view.azimuth_deg = record.value("azimuth", 0.0);
        view.radius = record.value("radius", 2.5);
        if (record.contains("look_at")) {
            const auto& look_at = record["look_at"];
            view.look_at = lari::Vec3{look_at.at(0).get<double>(), look_at.at(1).get<double>(),
                                      look_at.at(2).get<double>()};
        }
        view.validate();
        views.push_back(view);
    }
    return views;
}

/// Points selected by a LariFile's own mask, in row-major (h, w, l) order.
std::vector<lari::Vec3> cloud_from_lari(const lari::LariMap& map,
                                        const lari::StoppingIndexMap& index) {
    const lari::IntersectionMask mask = lari::mask_from_index(index, map.layers);
    return lari::select_points(map, mask);
}

std::vector<lari::Vec3> load_cloud(const std::string& path) {
    std::string ext = fs::path(path).extension().string();
    for (char& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".lari") {
        auto [map, index] = lari::read_lari(path);
        return cloud_from_lari(map, index);
    }
    if (ext == ".ply" || ext == ".obj") return lari::load_mesh(path).vertices;
    throw lari::Error(lari::ErrorCode::UnsupportedFormat,
                      path + ": expected .lari, .ply, or .obj");
}

// ---- render ----

struct RenderConfig {
    std::string mesh_path;
    std::string out = ".";
    std::string camera_manifest;
    double elevation = 0.0;
    double azimuth = 0.0;
    double radius = 2.5;
    int layers = 5;
    int size = 512;
    int workers = 0;
};

int cmd_render(const RenderConfig& config) {
    const lari::TriangleMesh mesh = lari::load_mesh(config.mesh_path);
    const lari::Bvh bvh = lari::build_bvh(mesh);

    std::vector<lari::ViewSpec> views;
    if (!config.camera_manifest.empty()) {
        views = load_view_manifest(config.camera_manifest);
        if (views.empty())
            throw lari::Error(lari::ErrorCode::EmptyCorpus,
                              config.camera_manifest + ": no views in manifest");
    } else {
        lari::ViewSpec view;
        view.elevation_deg = config.elevation;
        view.azimuth_deg = config.azimuth;
        view.radius = config.radius;
        view.validate();
        views.push_back(view);
    }

    // A single view may target one .lari path directly; otherwise --out is a
    // directory of view_NNN.lari files.
    const bool single_file = views.size() == 1 && config.out.size() > 5 &&
                             config.out.substr(config.out.size() - 5) == ".lari";
    if (!single_file) fs::create_directories(config.out);

    lari::RenderOptions options;
    options.layers = config.layers;
    options.workers = config.workers;

    int failures = 0;
    double overflow_total = 0.0;
    for (std::size_t v = 0; v < views.size(); ++v) {
        char name[32];
        std::snprintf(name, sizeof(name), "view_%03zu.lari", v);
        const std::string out_path =
            single_file ? config.out : (fs::path(config.out) / name).string();
        try {
            const lari::PinholeCamera camera =
                lari::camera_for_view(mesh, views[v], config.size, config.size);
            const lari::RenderResult result = lari::render_lari(mesh, bvh, camera, options);
            lari::write_lari(result.map, result.index, out_path);
            overflow_total += result.stats.overflow_fraction();
            std::cout << out_path << ": " << result.stats.total_pixels << " pixels, overflow "
                      << result.stats.overflow_fraction() << ", collapsed "
                      << result.stats.collapsed_fraction() << "\n";
        } catch (const lari::Error& error) {
            ++failures;
            std::cerr << json{{"view", v}, {"error", error_json(error)}}.dump() << "\n";
        }
    }
    std::cout << "rendered " << (views.size() - failures) << "/" << views.size()
              << " views, mean overflow fraction "
              << (views.empty() ? 0.0 : overflow_total / double(views.size())) << "\n";
    return failures == 0 ? 0 : 1;
}

// ---- filter ----

struct FilterConfig {
    std::string input;
    std::string out;
    double max_deep_fraction = 0.15;
    double min_coverage = 0.05;
    int layers = 5;
    int resolution = 128;
    std::size_t n_azimuth = 12;
    std::vector<double> elevations = {0.0, 30.0, 60.0};
    double radius = 2.5;
    int workers = 0;
};

struct MeshEntry {
    std::string id;
    std::string path;
};

std::vector<MeshEntry> collect_meshes(const std::string& input) {
    std::vector<MeshEntry> entries;
    if (fs::is_directory(input)) {
        for (const auto& item : fs::directory_iterator(input)) {
            if (!item.is_regular_file()) continue;
            std::string ext = item.path().extension().string();
            for (char& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
            if (ext == ".obj" || ext == ".ply")
                entries.push_back({item.path().stem().string(), item.path().string()});
        }
    } else {
        std::ifstream in(input);
        if (!in) throw lari::Error(lari::ErrorCode::IoError, "cannot open " + input);
        std::string line;
        std::size_t line_number = 0;
        while (std::getline(in, line)) {
            ++line_number;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json record;
            try {
                record = json::parse(line);
            } catch (const json::exception& e) {
                throw lari::Error(lari::ErrorCode::ParseError,
                                  input + ":" + std::to_string(line_number) + ": " + e.what());
            }
            const std::string path = record.at("mesh").get<std::string>();
            entries.push_back({record.value("id", fs::path(path).stem().string()), path});
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const MeshEntry& a, const MeshEntry& b) { return a.id < b.id; });
    if (entries.empty())
        throw lari::Error(lari::ErrorCode::EmptyCorpus, input + ": no meshes found");
    return entries;
}

/// Ids already present in an existing line-record file, so reruns skip them.
std::set<std::string> completed_ids(const std::string& path, const char* key) {
    std::set<std::string> ids;
    std::ifstream in(path);
    if (!in) return ids;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json record = json::parse(line);
            if (record.contains(key)) ids.insert(record[key].get<std::string>());
        } catch (const json::exception&) {
            // Unparseable lines are ignored; the record will be regenerated.
        }
    }
    return ids;
}

int cmd_filter(const FilterConfig& config) {
    const std::vector<MeshEntry> entries = collect_meshes(config.input);
    const std::vector<lari::ViewSpec> views =
        lari::sample_views(config.elevations, config.n_azimuth, config.radius);

    const std::set<std::string> done =
        config.out.empty() ? std::set<std::string>{} : completed_ids(config.out, "id");

    std::vector<std::string> lines;
    std::size_t accepted = 0, rejected = 0, errored = 0, skipped = 0;
    for (const MeshEntry& entry : entries) {
        if (done.count(entry.id)) {
            ++skipped;
            continue;
        }
        json record{{"id", entry.id}, {"mesh", entry.path}};
        try {
            const lari::TriangleMesh mesh = lari::load_mesh(entry.path);
            const lari::Bvh bvh = lari::build_bvh(mesh);
            lari::OccupancyOptions options;
            options.layers = config.layers;
            options.resolution = config.resolution;
            options.workers = config.workers;
            const lari::LayerOccupancyStats stats =
                lari::layer_occupancy(mesh, bvh, views, options);
            const lari::FilterVerdict verdict =
                lari::filter_object(stats, config.max_deep_fraction, config.min_coverage);

            record["stats"] = {{"mean_exceedance", stats.mean_exceedance},
                               {"max_exceedance", stats.max_exceedance},
                               {"views", stats.view_count}};
            json reasons = json::array();
            for (const lari::FilterFinding& finding : verdict.reasons)
                reasons.push_back({{"reason", lari::filter_reason_name(finding.reason)},
                                   {"value", finding.value},
                                   {"threshold", finding.threshold}});
            record["verdict"] = {{"accepted", verdict.accepted}, {"reasons", reasons}};
            record["thresholds"] = {{"max_deep_fraction", config.max_deep_fraction},
                                    {"min_coverage", config.min_coverage}};
            verdict.accepted ? ++accepted : ++rejected;
        } catch (const lari::Error& error) {
            record["error"] = error_json(error);
            ++errored;
        }
        lines.push_back(record.dump());
    }

    if (config.out.empty()) {
        for (const std::string& line : lines) std::cout << line << "\n";
    } else {
        std::ofstream out(config.out, std::ios::app);
        if (!out) throw lari::Error(lari::ErrorCode::IoError, "cannot open " + config.out);
        for (const std::string& line : lines) out << line << "\n";
        if (!out.good()) throw lari::Error(lari::ErrorCode::IoError, "write failed on " + config.out);
    }
    std::cout << "accepted " << accepted << ", rejected " << rejected << ", errors " << errored;
    if (skipped > 0) std::cout << ", already done " << skipped;
    std::cout << "\n";
    return 0;  // the run completed; verdicts and per-object errors are in the manifest
}

// ---- eval ----

struct EvalConfig {
    std::string pred;
    std::string gt;
    std::string pairs_manifest;
    std::string out;
    std::string mode = "view-aligned";
    std::string region = "overall";
    std::size_t samples = 0;  // 0: pick 10000 or 100000 by cloud size
    std::vector<double> thresholds = {0.1, 0.05, 0.02};
    uint64_t seed = 0;
    bool fixed_sample = false;
};

struct EvalPair {
    std::string id;
    std::string pred;
    std::string gt;
};

lari::Region parse_region(const std::string& name) {
    if (name == "visible") return lari::Region::Visible;
    if (name == "unseen") return lari::Region::Unseen;
    if (name == "overall") return lari::Region::Overall;
    throw lari::Error(lari::ErrorCode::InvalidArgument, "unknown region " + name);
}

std::size_t auto_samples(std::size_t pred_size, std::size_t gt_size) {
    return (pred_size < 1000000 && gt_size < 1000000) ? 10000 : 100000;
}

lari::MetricsReport eval_one(const EvalPair& pair, const EvalConfig& config) {
    auto [gt_map, gt_index] = lari::read_lari(pair.gt);
    const lari::IntersectionMask gt_mask = lari::mask_from_index(gt_index, gt_map.layers);

    if (config.mode == "canonical") {
        const std::vector<lari::Vec3> pred_cloud = load_cloud(pair.pred);
        const std::vector<lari::Vec3> gt_cloud = lari::select_points(gt_map, gt_mask);
        lari::CanonicalEvaluateOptions options;
        options.thresholds = config.thresholds;
        options.seed = config.seed;
        options.n_samples = config.samples ? config.samples
                                           : auto_samples(pred_cloud.size(), gt_cloud.size());
        return lari::evaluate_canonical(pred_cloud, gt_cloud, options).report;
    }

    lari::EvaluateOptions options;
    options.region = parse_region(config.region);
    options.thresholds = config.thresholds;
    options.seed = config.seed;
    options.fixed_sample = config.fixed_sample;

    std::string ext = fs::path(pair.pred).extension().string();
    for (char& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".lari") {
        auto [pred_map, pred_index] = lari::read_lari(pair.pred);
        const lari::IntersectionMask pred_mask =
            lari::mask_from_index(pred_index, pred_map.layers);
        options.n_samples =
            config.samples ? config.samples : auto_samples(pred_mask.count(), gt_mask.count());
        return lari::evaluate_view_aligned(pred_map, pred_mask, gt_map, gt_mask, options);
    }
    const std::vector<lari::Vec3> pred_cloud = load_cloud(pair.pred);
    options.n_samples =
        config.samples ? config.samples : auto_samples(pred_cloud.size(), gt_mask.count());
    return lari::evaluate_view_aligned(pred_cloud, gt_map, gt_mask, options);
}

int cmd_eval(const EvalConfig& config) {
    std::vector<EvalPair> pairs;
    if (!config.pairs_manifest.empty()) {
        std::ifstream in(config.pairs_manifest);
        if (!in)
            throw lari::Error(lari::ErrorCode::IoError, "cannot open " + config.pairs_manifest);
        std::string line;
        std::size_t line_number = 0;
        while (std::getline(in, line)) {
            ++line_number;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json record;
            try {
                record = json::parse(line);
            } catch (const json::exception& e) {
                throw lari::Error(
                    lari::ErrorCode::ParseError,
                    config.pairs_manifest + ":" + std::to_string(line_number) + ": " + e.what());
            }
            EvalPair pair;
            pair.pred = record.at("pred").get<std::string>();
            pair.gt = record.at("gt").get<std::string>();
            pair.id = record.value("id", fs::path(pair.pred).stem().string());
            pairs.push_back(pair);
        }
        std::sort(pairs.begin(), pairs.end(),
                  [](const EvalPair& a, const EvalPair& b) { return a.id < b.id; });
    } else {
        if (config.pred.empty() || config.gt.empty())
            throw lari::Error(lari::ErrorCode::InvalidArgument,
                              "need --pred and --gt, or --pairs");
        pairs.push_back({fs::path(config.pred).stem().string(), config.pred, config.gt});
    }
    if (pairs.empty())
        throw lari::Error(lari::ErrorCode::EmptyCorpus, "no evaluation pairs given");

    const std::set<std::string> done =
        config.out.empty() ? std::set<std::string>{} : completed_ids(config.out, "image_id");

    std::vector<std::string> lines;
    std::size_t failures = 0, evaluated = 0, skipped = 0;
    double cd_sum = 0.0;
    std::size_t cd_count = 0;
    std::map<double, double> fs_sums;
    for (const EvalPair& pair : pairs) {
        if (done.count(pair.id)) {
            ++skipped;
            continue;
        }
        try {
            const lari::MetricsReport report = eval_one(pair, config);
            lines.push_back(lari::report_json_line(pair.id, report));
            ++evaluated;
            if (std::isfinite(report.cd)) {
                cd_sum += report.cd;
                ++cd_count;
            }
            for (const auto& [tau, value] : report.fs) fs_sums[tau] += value;
        } catch (const lari::Error& error) {
            ++failures;
            lines.push_back(json{{"image_id", pair.id}, {"error", error_json(error)}}.dump());
        }
    }

    if (config.out.empty()) {
        for (const std::string& line : lines) std::cout << line << "\n";
    } else {
        std::ofstream out(config.out, std::ios::app);
        if (!out) throw lari::Error(lari::ErrorCode::IoError, "cannot open " + config.out);
        for (const std::string& line : lines) out << line << "\n";
        if (!out.good()) throw lari::Error(lari::ErrorCode::IoError, "write failed on " + config.out);
    }

    std::cout << "evaluated " << evaluated << "/" << (pairs.size() - skipped) << " pairs";
    if (skipped > 0) std::cout << " (" << skipped << " already done)";
    std::cout << "\n";
    if (cd_count > 0) std::cout << "mean cd " << (cd_sum / double(cd_count)) << "\n";
    for (const auto& [tau, sum] : fs_sums)
        if (evaluated > 0) std::cout << "mean fs@" << tau << " " << (sum / double(evaluated)) << "\n";
    return (evaluated > 0 || (failures == 0 && skipped > 0)) ? 0 : 1;
}

// ---- mask-eval ----

struct MaskEvalConfig {
    std::string pred;
    std::string gt;
    std::string out;
};

int cmd_mask_eval(const MaskEvalConfig& config) {
    auto [pred_map, pred_index] = lari::read_lari(config.pred);
    auto [gt_map, gt_index] = lari::read_lari(config.gt);
    const lari::IntersectionMask pred_mask = lari::mask_from_index(pred_index, pred_map.layers);
    const lari::IntersectionMask gt_mask = lari::mask_from_index(gt_index, gt_map.layers);
    const auto [miou, dice] = lari::mask_metrics(pred_mask, gt_mask);

    const json record{{"pred", config.pred}, {"gt", config.gt}, {"miou", miou}, {"dice", dice}};
    std::cout << record.dump() << "\n";
    if (!config.out.empty()) {
        std::ofstream out(config.out, std::ios::app);
        if (!out) throw lari::Error(lari::ErrorCode::IoError, "cannot open " + config.out);
        out << record.dump() << "\n";
        if (!out.good()) throw lari::Error(lari::ErrorCode::IoError, "write failed on " + config.out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layered ray-intersection ground truth: render, filter, evaluate"};
    app.require_subcommand(1);

    RenderConfig render_config;
    CLI::App* render = app.add_subcommand("render", "Render LaRI maps for a mesh");
    render->add_option("mesh", render_config.mesh_path, "Mesh file (.obj or .ply)")->required();
    render->add_option("--out", render_config.out,
                       "Output .lari path (single view) or directory");
    render->add_option("--cameras", render_config.camera_manifest,
                       "View manifest (one JSON object per line)");
    render->add_option("--elevation", render_config.elevation, "Orbit elevation in degrees");
    render->add_option("--azimuth", render_config.azimuth, "Orbit azimuth in degrees");
    render->add_option("--radius", render_config.radius,
                       "Orbit radius in bounding-sphere multiples");
    render->add_option("--layers", render_config.layers, "Layer count L");
    render->add_option("--size", render_config.size, "Square image size in pixels");
    render->add_option("--workers", render_config.workers,
                       "Worker threads (0: LARI_WORKERS or hardware)");

    FilterConfig filter_config;
    CLI::App* filter = app.add_subcommand("filter", "Filter a mesh corpus by layer occupancy");
    filter->add_option("input", filter_config.input, "Mesh directory or manifest")->required();
    filter->add_option("--out", filter_config.out, "Verdict manifest path (appended)");
    filter->add_option("--max-deep-fraction", filter_config.max_deep_fraction,
                       "Reject when the coverage-relative deep fraction exceeds this");
    filter->add_option("--min-coverage", filter_config.min_coverage,
                       "Reject when mean foreground coverage is below this");
    filter->add_option("--layers", filter_config.layers, "Layer count for the stats renders");
    filter->add_option("--resolution", filter_config.resolution, "Stats render resolution");
    filter->add_option("--azimuths", filter_config.n_azimuth, "Azimuth count per elevation");
    filter->add_option("--elevations", filter_config.elevations, "Elevation list in degrees")
        ->delimiter(',');
    filter->add_option("--radius", filter_config.radius,
                       "Orbit radius in bounding-sphere multiples");
    filter->add_option("--workers", filter_config.workers,
                       "Worker threads (0: LARI_WORKERS or hardware)");

    EvalConfig eval_config;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate predictions against ground truth");
    eval->add_option("--pred", eval_config.pred, "Prediction (.lari, .ply, or .obj)");
    eval->add_option("--gt", eval_config.gt, "Ground truth (.lari)");
    eval->add_option("--pairs", eval_config.pairs_manifest,
                     "Pair manifest (one JSON object per line)");
    eval->add_option("--out", eval_config.out, "Report path (appended)");
    eval->add_option("--mode", eval_config.mode, "view-aligned or canonical")
        ->check(CLI::IsMember({"view-aligned", "canonical"}));
    eval->add_option("--region", eval_config.region, "visible, unseen, or overall")
        ->check(CLI::IsMember({"visible", "unseen", "overall"}));
    eval->add_option("--samples", eval_config.samples,
                     "Sample count (default 10000, or 100000 for large clouds)");
    eval->add_option("--thresholds", eval_config.thresholds, "F-score distance thresholds")
        ->delimiter(',');
    eval->add_option("--seed", eval_config.seed, "Sampling seed");
    eval->add_flag("--fixed-sample", eval_config.fixed_sample,
                   "Sample identical pixel positions from pred and gt");

    MaskEvalConfig mask_config;
    CLI::App* mask_eval = app.add_subcommand("mask-eval", "Compare intersection masks");
    mask_eval->add_option("--pred", mask_config.pred, "Prediction (.lari)")->required();
    mask_eval->add_option("--gt", mask_config.gt, "Ground truth (.lari)")->required();
    mask_eval->add_option("--out", mask_config.out, "Record path (appended)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (render->parsed()) return cmd_render(render_config);
        if (filter->parsed()) return cmd_filter(filter_config);
        if (eval->parsed()) return cmd_eval(eval_config);
        if (mask_eval->parsed()) return cmd_mask_eval(mask_config);
    } catch (const lari::Error& error) {
        std::cerr << json{{"error", error_json(error)}}.dump() << "\n";
        return 1;
    } catch (const std::exception& error) {
        std::cerr << json{{"error", {{"code", "unexpected"}, {"message", error.what()}}}}.dump()
                  << "\n";
        return 1;
    }
    return 1;
}
