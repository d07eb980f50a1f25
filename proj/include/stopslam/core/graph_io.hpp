#pragma once

#include <filesystem>
#include <iosfwd>

#include "stopslam/core/pose_graph.hpp"

namespace stopslam {

// Plain-text pose-graph records, one per line:
//   VERTEX_SE2 id x y theta
//   EDGE_SE2 from to dx dy dtheta i11 i12 i13 i22 i23 i33
// Lines starting with '#' and blank lines are ignored. Reals are written with 17
// significant digits so export followed by import reproduces the graph exactly.
// Edges joining consecutive ids are read back as odometry, all others as loop closures.

void write_pose_graph(std::ostream& out, const PoseGraph& graph);
void export_pose_graph(const PoseGraph& graph, const std::filesystem::path& path);

/// Throws ParseError (with the offending line number) on malformed records, duplicate or
/// non-contiguous vertex ids, edges referencing missing vertices, or a disconnected graph.
PoseGraph read_pose_graph(std::istream& in);
PoseGraph import_pose_graph(const std::filesystem::path& path);

}  // namespace stopslam
