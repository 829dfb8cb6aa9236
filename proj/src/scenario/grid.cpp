#include "btrv/scenario/grid.hpp"

#include <deque>

#include "btrv/core/errors.hpp"

namespace btrv::scenario {

namespace {

constexpr Cell kSteps[] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};  // N, E, S, W

}  // namespace

GridWorld GridWorld::parse(const std::vector<std::string>& rows) {
  GridWorld g;
  if (rows.empty()) throw ModelError("map has no rows");
  g.height_ = static_cast<int>(rows.size());
  g.width_ = static_cast<int>(rows.front().size());
  if (g.width_ == 0) throw ModelError("map has empty rows");
  g.free_.assign(static_cast<std::size_t>(g.width_ * g.height_), false);
  bool have_start = false, have_dest = false, have_station = false;
  for (int y = 0; y < g.height_; ++y) {
    const std::string& row = rows[static_cast<std::size_t>(y)];
    if (static_cast<int>(row.size()) != g.width_)
      throw ModelError("map row " + std::to_string(y + 1) + " has length " + std::to_string(row.size()) +
                       ", expected " + std::to_string(g.width_));
    for (int x = 0; x < g.width_; ++x) {
      const char ch = row[static_cast<std::size_t>(x)];
      const Cell c{x, y};
      auto unique = [&](bool& seen, Cell& where, const char* what) {
        if (seen) throw ModelError(std::string("map has more than one ") + what);
        seen = true;
        where = c;
      };
      switch (ch) {
        case '#': continue;
        case '.': break;
        case '@': unique(have_start, g.start_, "robot start '@'"); break;
        case 'D': unique(have_dest, g.destination_, "destination 'D'"); break;
        case 'R': unique(have_station, g.station_, "recharging station 'R'"); break;
        default:
          throw ModelError("map cell (" + std::to_string(x) + "," + std::to_string(y) + ") has unknown symbol '" +
                           std::string(1, ch) + "'");
      }
      g.free_[static_cast<std::size_t>(g.index(c))] = true;
    }
  }
  if (!have_start) throw ModelError("map has no robot start '@'");
  if (!have_dest) throw ModelError("map has no destination 'D'");
  if (!have_station) throw ModelError("map has no recharging station 'R'");
  return g;
}

std::vector<int> GridWorld::distances_to(Cell goal) const {
  std::vector<int> dist(static_cast<std::size_t>(cells()), -1);
  if (!is_free(goal)) return dist;
  std::deque<Cell> queue{goal};
  dist[static_cast<std::size_t>(index(goal))] = 0;
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    for (Cell d : kSteps) {
      Cell n{c.x + d.x, c.y + d.y};
      if (!is_free(n) || dist[static_cast<std::size_t>(index(n))] >= 0) continue;
      dist[static_cast<std::size_t>(index(n))] = dist[static_cast<std::size_t>(index(c))] + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

int GridWorld::distance(Cell from, Cell goal) const {
  if (!is_free(from)) return -1;
  return distances_to(goal)[static_cast<std::size_t>(index(from))];
}

std::optional<Cell> GridWorld::next_step(Cell from, Cell goal) const {
  if (from == goal || !is_free(from)) return std::nullopt;
  auto dist = distances_to(goal);
  int here = dist[static_cast<std::size_t>(index(from))];
  if (here < 0) return std::nullopt;
  for (Cell d : kSteps) {
    Cell n{from.x + d.x, from.y + d.y};
    if (is_free(n) && dist[static_cast<std::size_t>(index(n))] == here - 1) return n;
  }
  return std::nullopt;
}

std::vector<std::string> GridWorld::render(std::optional<Cell> robot) const {
  std::vector<std::string> rows;
  for (int y = 0; y < height_; ++y) {
    std::string row;
    for (int x = 0; x < width_; ++x) {
      Cell c{x, y};
      char ch = is_free(c) ? '.' : '#';
      if (c == destination_) ch = 'D';
      if (c == station_) ch = 'R';
      if (robot ? c == *robot : c == start_) ch = '@';
      row += ch;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Heading heading_between(Cell from, Cell to) {
  if (to.y < from.y) return Heading::North;
  if (to.x > from.x) return Heading::East;
  if (to.y > from.y) return Heading::South;
  return Heading::West;
}

std::string_view to_string(Heading h) {
  switch (h) {
    case Heading::North: return "N";
    case Heading::East: return "E";
    case Heading::South: return "S";
    case Heading::West: return "W";
  }
  return "?";
}

}  // namespace btrv::scenario
