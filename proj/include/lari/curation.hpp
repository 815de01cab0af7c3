#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "lari/bvh.hpp"
#include "lari/camera.hpp"
#include "lari/error.hpp"
#include "lari/mesh.hpp"
#include "lari/render.hpp"
#include "lari/vec.hpp"

namespace lari {

/// One orbit camera placement. Radius is a multiple of the mesh
/// bounding-sphere radius; an unset look_at means the mesh box center.
struct ViewSpec {
    double elevation_deg = 0.0;  // in [-90, 90]
    double azimuth_deg = 0.0;
    double radius = 2.5;  // must exceed 1 so the camera sits outside the object
    std::optional<Vec3> look_at;

    void validate() const {
        if (!(radius > 1.0))
            throw Error(ErrorCode::InvalidArgument, "view radius must exceed 1");
        if (!(elevation_deg >= -90.0 && elevation_deg <= 90.0))
            throw Error(ErrorCode::InvalidArgument, "elevation must lie in [-90, 90] degrees");
    }
};

/// Exceedance fractions aggregated over views. Entry k is the fraction of
/// pixels whose stopping index is >= k, except entry 0 which reports
/// foreground coverage (stopping index >= 1), so entries 0 and 1 coincide.
/// Entries are non-increasing in the layer index.
struct LayerOccupancyStats {
    std::vector<double> mean_exceedance;  // L+1 entries, averaged over views
    std::vector<double> max_exceedance;   // L+1 entries, per-layer max over views
    std::size_t layers = 0;
    std::size_t view_count = 0;

    double mean_coverage() const { return mean_exceedance.empty() ? 0.0 : mean_exceedance[0]; }

    /// Fraction of covered pixels with more than two intersections: the deep
    /// exceedance relative to foreground coverage, so the statistic measures
    /// the object's own layering and does not change with camera framing.
    /// Zero when nothing is covered.
    double mean_deep_fraction() const {
        if (mean_exceedance.size() < 4 || mean_exceedance[0] <= 0.0) return 0.0;
        return mean_exceedance[3] / mean_exceedance[0];
    }
};

enum class FilterReason { InternalStructure, TooSmall };

inline const char* filter_reason_name(FilterReason reason) {
    switch (reason) {
        case FilterReason::InternalStructure: return "internal_structure";
        case FilterReason::TooSmall: return "too_small";
    }
    return "unknown";
}

struct FilterFinding {
    FilterReason reason;
    double value;      // the statistic that triggered the rejection
    double threshold;  // the limit it was compared against
};

struct FilterVerdict {
    bool accepted = true;
    std::vector<FilterFinding> reasons;  // non-empty exactly when rejected
};

struct OccupancyOptions {
    int layers = 5;
    int resolution = 128;  // square stats render
    int workers = 0;
};

/// Evenly spaced orbit views: every elevation crossed with n_azimuth
/// azimuths stepping from 0 degrees. The seed is accepted for interface
/// stability; placement is fully deterministic.
inline std::vector<ViewSpec> sample_views(const std::vector<double>& elevations_deg,
                                          std::size_t n_azimuth, double radius = 2.5,
                                          uint64_t seed = 0) {
    (void)seed;
    if (n_azimuth == 0)
        throw Error(ErrorCode::InvalidArgument, "need at least one azimuth per elevation");
    std::vector<ViewSpec> views;
    views.reserve(elevations_deg.size() * n_azimuth);
    for (double elevation : elevations_deg) {
        for (std::size_t i = 0; i < n_azimuth; ++i) {
            ViewSpec view;
            view.elevation_deg = elevation;
            view.azimuth_deg = 360.0 * double(i) / double(n_azimuth);
            view.radius = radius;
            views.push_back(view);
            views.back().validate();
        }
    }
    return views;
}

/// Camera for one view of a mesh: orbit position around the look-at point,
/// fixed intrinsics fx = fy = width so projected size tracks the orbit
/// radius (a distant object becomes small instead of being reframed).
inline PinholeCamera camera_for_view(const TriangleMesh& mesh, const ViewSpec& view,
                                     int width, int height) {
    view.validate();
    const Vec3 center = view.look_at ? *view.look_at : mesh.bounds().center();
    const double orbit_radius = view.radius * mesh.bounding_sphere_radius();
    const Vec3 eye = orbit_position(center, orbit_radius, view.elevation_deg, view.azimuth_deg);

    PinholeCamera camera;
    camera.width = width;
    camera.height = height;
    camera.fx = double(width);
    camera.fy = double(width);
    camera.cx = 0.5 * double(width);
    camera.cy = 0.5 * double(height);
    camera.pose = look_at(eye, center);
    camera.validate();
    return camera;
}

/// Renders each view and aggregates stopping-index exceedance fractions.
inline LayerOccupancyStats layer_occupancy(const TriangleMesh& mesh, const Bvh& bvh,
                                           const std::vector<ViewSpec>& views,
                                           const OccupancyOptions& options = {}) {
    if (views.empty())
        throw Error(ErrorCode::InvalidArgument, "layer_occupancy needs at least one view");
    if (mesh.triangle_count() == 0) throw Error(ErrorCode::EmptyMesh, "mesh has no triangles");

    if (options.layers < 1 || options.resolution < 1)
        throw Error(ErrorCode::InvalidArgument, "layers and resolution must be positive");
    const std::size_t entries = std::size_t(options.layers) + 1;
    LayerOccupancyStats stats;
    stats.layers = std::size_t(options.layers);
    stats.view_count = views.size();
    stats.mean_exceedance.assign(entries, 0.0);
    stats.max_exceedance.assign(entries, 0.0);

    RenderOptions render_options;
    render_options.layers = options.layers;
    render_options.workers = options.workers;

    for (const ViewSpec& view : views) {
        const PinholeCamera camera = camera_for_view(mesh, view, options.resolution,
                                                     options.resolution);
        const RenderResult render = render_lari(mesh, bvh, camera, render_options);

        std::vector<std::size_t> at_least(entries, 0);  // pixels with index >= k, k in 1..L
        const std::size_t pixels = render.index.values.size();
        for (uint8_t c : render.index.values)
            for (std::size_t k = 1; k < entries && k <= c; ++k) ++at_least[k];
        at_least[0] = at_least[1];  // entry 0 reports coverage

        for (std::size_t k = 0; k < entries; ++k) {
            const double fraction = double(at_least[k]) / double(pixels);
            stats.mean_exceedance[k] += fraction / double(views.size());
            stats.max_exceedance[k] = std::max(stats.max_exceedance[k], fraction);
        }
    }
    return stats;
}

/// Accept/reject decision from occupancy statistics. The structure check
/// compares the coverage-relative deep fraction against max_deep_fraction;
/// the size check compares absolute coverage against min_coverage.
/// Rejections carry the triggering value alongside the threshold it violated.
inline FilterVerdict filter_object(const LayerOccupancyStats& stats,
                                   double max_deep_fraction = 0.15,
                                   double min_coverage = 0.05) {
    FilterVerdict verdict;
    const double deep = stats.mean_deep_fraction();
    if (deep > max_deep_fraction)
        verdict.reasons.push_back({FilterReason::InternalStructure, deep, max_deep_fraction});
    const double coverage = stats.mean_coverage();
    if (coverage < min_coverage)
        verdict.reasons.push_back({FilterReason::TooSmall, coverage, min_coverage});
    verdict.accepted = verdict.reasons.empty();
    return verdict;
}

}  // namespace lari
