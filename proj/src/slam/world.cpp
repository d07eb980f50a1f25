#include "stopslam/slam/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include "stopslam/core/errors.hpp"

namespace stopslam::slam {

WorldModel::WorldModel(GridGeometry geometry, std::vector<unsigned char> cells)
    : geometry_(geometry), occupied_(std::move(cells)) {
  if (geometry_.width < 3 || geometry_.height < 3) throw ConfigError("world must be at least 3x3 cells");
  if (!(geometry_.resolution > 0.0)) throw ConfigError("world resolution must be positive");
  if (occupied_.size() != geometry_.cell_count()) throw ConfigError("world cell count does not match its geometry");
  for (int x = 0; x < geometry_.width; ++x) {
    if (!occupied({x, 0}) || !occupied({x, geometry_.height - 1})) throw ConfigError("world boundary is not closed");
  }
  for (int y = 0; y < geometry_.height; ++y) {
    if (!occupied({0, y}) || !occupied({geometry_.width - 1, y})) throw ConfigError("world boundary is not closed");
  }
}

WorldModel WorldModel::parse(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  double resolution = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    if (key != "resolution" || !(fields >> resolution) || !(resolution > 0.0)) {
      throw ParseError(line_no, "world file must start with 'resolution <metres>'");
    }
    break;
  }
  if (!(resolution > 0.0)) throw ParseError(line_no, "world file is missing its resolution line");

  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!rows.empty() && line.size() != rows.front().size()) throw ParseError(line_no, "world rows differ in width");
    if (line.find_first_not_of("#.") != std::string::npos) throw ParseError(line_no, "world rows may contain only '#' and '.'");
    rows.push_back(line);
  }
  if (rows.empty()) throw ParseError(line_no, "world file has no grid rows");

  GridGeometry geometry;
  geometry.width = static_cast<int>(rows.front().size());
  geometry.height = static_cast<int>(rows.size());
  geometry.resolution = resolution;
  std::vector<unsigned char> occupied(geometry.cell_count());
  for (int r = 0; r < geometry.height; ++r) {
    const int y = geometry.height - 1 - r;
    for (int x = 0; x < geometry.width; ++x) {
      occupied[geometry.index({x, y})] = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] == '#' ? 1 : 0;
    }
  }
  return WorldModel(geometry, std::move(occupied));
}

WorldModel WorldModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open world file " + path.string());
  return parse(in);
}

bool WorldModel::collides(const Eigen::Vector2d& p, double radius) const {
  const Cell center = geometry_.cell_of(p);
  if (occupied(center)) return true;
  const int reach = static_cast<int>(std::ceil(radius / geometry_.resolution)) + 1;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const Cell c{center.x + dx, center.y + dy};
      if (occupied(c) && (geometry_.center(c) - p).norm() <= radius) return true;
    }
  }
  return false;
}

std::vector<double> distance_transform(int width, int height, const std::vector<unsigned char>& seed) {
  // Felzenszwalb-Huttenlocher lower envelope of parabolas, columns then rows.
  constexpr double kInf = 1e20;
  const auto w = static_cast<std::size_t>(width);
  const auto h = static_cast<std::size_t>(height);
  std::vector<double> sq(w * h);
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = seed[i] ? 0.0 : kInf;

  auto pass = [](std::vector<double>& f, std::size_t n) {
    std::vector<double> d(n);
    std::vector<std::size_t> v(n);
    std::vector<double> z(n + 1);
    std::size_t k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (std::size_t q = 1; q < n; ++q) {
      const auto qd = static_cast<double>(q);
      auto intersect = [&](std::size_t vk) {
        const auto vd = static_cast<double>(vk);
        return ((f[q] + qd * qd) - (f[vk] + vd * vd)) / (2.0 * qd - 2.0 * vd);
      };
      double s = intersect(v[k]);
      while (s <= z[k]) {
        --k;
        s = intersect(v[k]);
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (std::size_t q = 0; q < n; ++q) {
      while (z[k + 1] < static_cast<double>(q)) ++k;
      const double diff = static_cast<double>(q) - static_cast<double>(v[k]);
      d[q] = diff * diff + f[v[k]];
    }
    f = std::move(d);
  };

  std::vector<double> line;
  for (std::size_t x = 0; x < w; ++x) {
    line.resize(h);
    for (std::size_t y = 0; y < h; ++y) line[y] = sq[y * w + x];
    pass(line, h);
    for (std::size_t y = 0; y < h; ++y) sq[y * w + x] = line[y];
  }
  for (std::size_t y = 0; y < h; ++y) {
    line.assign(sq.begin() + static_cast<std::ptrdiff_t>(y * w), sq.begin() + static_cast<std::ptrdiff_t>((y + 1) * w));
    pass(line, w);
    std::copy(line.begin(), line.end(), sq.begin() + static_cast<std::ptrdiff_t>(y * w));
  }
  std::vector<double> out(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    out[i] = sq[i] >= kInf / 2 ? std::numeric_limits<double>::infinity() : std::sqrt(sq[i]);
  }
  return out;
}

std::vector<double> WorldModel::obstacle_distance() const {
  auto d = distance_transform(geometry_.width, geometry_.height, occupied_);
  for (double& v : d) v *= geometry_.resolution;
  return d;
}

Pose2 WorldModel::default_start() const {
  const auto d = obstacle_distance();
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!occupied_[i] && d[i] > best_d) {
      best_d = d[i];
      best = i;
    }
  }
  if (best_d <= 0.0) throw ConfigError("world has no free cell");
  const Eigen::Vector2d p = geometry_.center(geometry_.cell_at(best));
  return {p.x(), p.y(), 0.0};
}

}  // namespace stopslam::slam
