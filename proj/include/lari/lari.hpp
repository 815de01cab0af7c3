#pragma once

// Umbrella header: layered ray-intersection maps from triangle meshes,
// plus the alignment, metrics, curation, and serialization tools around them.

#include "lari/align.hpp"
#include "lari/bvh.hpp"
#include "lari/camera.hpp"
#include "lari/curation.hpp"
#include "lari/error.hpp"
#include "lari/evaluate.hpp"
#include "lari/icp.hpp"
#include "lari/intersect.hpp"
#include "lari/kdtree.hpp"
#include "lari/lari_file.hpp"
#include "lari/lari_map.hpp"
#include "lari/mesh.hpp"
#include "lari/mesh_io.hpp"
#include "lari/metrics.hpp"
#include "lari/parallel.hpp"
#include "lari/pose.hpp"
#include "lari/render.hpp"
#include "lari/vec.hpp"
