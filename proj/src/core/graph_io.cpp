#include "stopslam/core/graph_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "stopslam/core/errors.hpp"

namespace stopslam {

void write_pose_graph(std::ostream& out, const PoseGraph& graph) {
  for (const auto& node : graph.nodes()) {
    fmt::print(out, "VERTEX_SE2 {} {:.17g} {:.17g} {:.17g}\n", node.id, node.pose.x(), node.pose.y(), node.pose.theta());
  }
  for (const auto& e : graph.edges()) {
    const auto& m = e.info.matrix();
    fmt::print(out, "EDGE_SE2 {} {} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\n", e.from_id,
               e.to_id, e.measurement.x(), e.measurement.y(), e.measurement.theta(), m(0, 0), m(0, 1), m(0, 2), m(1, 1),
               m(1, 2), m(2, 2));
  }
}

void export_pose_graph(const PoseGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  write_pose_graph(out, graph);
}

namespace {

struct PendingEdge {
  std::size_t line;
  GraphEdge edge;
};

template <typename T>
void read_field(std::istringstream& fields, T& value, std::size_t line, const char* what) {
  if (!(fields >> value)) throw ParseError(line, std::string("missing or malformed ") + what);
}

}  // namespace

PoseGraph read_pose_graph(std::istream& in) {
  std::map<long long, std::pair<std::size_t, Pose2>> vertices;
  std::vector<PendingEdge> edges;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::istringstream fields(text);
    std::string tag;
    if (!(fields >> tag) || tag.front() == '#') continue;
    if (tag == "VERTEX_SE2") {
      long long id = 0;
      double x = 0, y = 0, theta = 0;
      read_field(fields, id, line, "vertex id");
      read_field(fields, x, line, "x");
      read_field(fields, y, line, "y");
      read_field(fields, theta, line, "theta");
      if (id < 0) throw ParseError(line, "negative vertex id");
      if (!vertices.emplace(id, std::pair{line, Pose2(x, y, theta)}).second) {
        throw ParseError(line, "duplicate vertex id " + std::to_string(id));
      }
    } else if (tag == "EDGE_SE2") {
      long long from = 0, to = 0;
      double dx = 0, dy = 0, dt = 0;
      double i11 = 0, i12 = 0, i13 = 0, i22 = 0, i23 = 0, i33 = 0;
      read_field(fields, from, line, "edge source");
      read_field(fields, to, line, "edge target");
      read_field(fields, dx, line, "dx");
      read_field(fields, dy, line, "dy");
      read_field(fields, dt, line, "dtheta");
      read_field(fields, i11, line, "i11");
      read_field(fields, i12, line, "i12");
      read_field(fields, i13, line, "i13");
      read_field(fields, i22, line, "i22");
      read_field(fields, i23, line, "i23");
      read_field(fields, i33, line, "i33");
      if (from < 0 || to < 0) throw ParseError(line, "negative vertex id in edge");
      Eigen::Matrix3d info;
      info << i11, i12, i13, i12, i22, i23, i13, i23, i33;
      GraphEdge edge;
      edge.from_id = static_cast<NodeId>(from);
      edge.to_id = static_cast<NodeId>(to);
      edge.measurement = Pose2(dx, dy, dt);
      try {
        edge.info = InfoMatrix3(info);
      } catch (const DomainError& e) {
        throw ParseError(line, e.what());
      }
      edge.kind = edge.to_id == edge.from_id + 1 ? EdgeKind::odometry : EdgeKind::loop_closure;
      edges.push_back({line, edge});
    } else {
      throw ParseError(line, "unknown record type '" + tag + "'");
    }
    std::string extra;
    if (fields >> extra) throw ParseError(line, "trailing field '" + extra + "'");
  }

  PoseGraph graph;
  long long expected = 0;
  for (const auto& [id, entry] : vertices) {
    if (id != expected) throw ParseError(entry.first, "vertex ids must be contiguous from 0; missing id " + std::to_string(expected));
    graph.add_node(entry.second);
    ++expected;
  }
  for (const auto& pending : edges) {
    if (pending.edge.from_id >= graph.node_count() || pending.edge.to_id >= graph.node_count()) {
      throw ParseError(pending.line, "edge references a missing vertex");
    }
    try {
      graph.add_edge(pending.edge);
    } catch (const ConfigError& e) {
      throw ParseError(pending.line, e.what());
    }
  }
  if (!graph.is_connected()) throw ParseError(0, "pose graph is not connected");
  return graph;
}

PoseGraph import_pose_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_pose_graph(in);
}

}  // namespace stopslam
