#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace btrv::scenario {

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

enum class Heading { North, East, South, West };

/// Occupancy grid loaded from ASCII rows: '#' obstacle, '.' free,
/// 'D' destination, 'R' recharging station, '@' robot start.
class GridWorld {
 public:
  static GridWorld parse(const std::vector<std::string>& rows);

  int width() const { return width_; }
  int height() const { return height_; }
  int cells() const { return width_ * height_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool is_free(Cell c) const { return in_bounds(c) && free_[static_cast<std::size_t>(index(c))]; }
  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell(int index) const { return {index % width_, index / width_}; }

  Cell start() const { return start_; }
  Cell destination() const { return destination_; }
  Cell station() const { return station_; }

  /// 4-connected BFS distances to `goal`; -1 for unreachable cells.
  std::vector<int> distances_to(Cell goal) const;
  int distance(Cell from, Cell goal) const;

  /// First move of a shortest path from `from` to `goal` (neighbors tried
  /// in N, E, S, W order), or nullopt when unreachable or already there.
  std::optional<Cell> next_step(Cell from, Cell goal) const;

  std::vector<std::string> render(std::optional<Cell> robot = std::nullopt) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<bool> free_;
  Cell start_;
  Cell destination_;
  Cell station_;
};

Heading heading_between(Cell from, Cell to);
std::string_view to_string(Heading h);

}  // namespace btrv::scenario
