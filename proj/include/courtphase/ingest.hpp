#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace courtphase {

// Court geometry in cm, origin at the centre of the half-court line.
inline constexpr int kCourtHalfLengthCm = 1400;
inline constexpr int kCourtHalfWidthCm = 750;
inline constexpr int kApronCm = 200;
inline constexpr int kMaxAbsXCm = kCourtHalfLengthCm + kApronCm;
inline constexpr int kMaxAbsYCm = kCourtHalfWidthCm + 100;

struct RawSample {
  std::int64_t timestamp_ms = 0;
  std::string player_id;
  int x_cm = 0;
  int y_cm = 0;
  std::optional<int> z_cm;
};

enum class EventKind {
  PreMatch,
  QuarterBreak,
  HalfBreak,
  PostMatch,
  Timeout,
  FreeThrow,
  PeriodStart,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct GameEvent {
  EventKind kind = EventKind::Timeout;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::optional<int> period_index;
};

// Half-open [start_ms, end_ms).
struct TimeInterval {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  bool contains(std::int64_t t) const { return t >= start_ms && t < end_ms; }
  std::int64_t length() const { return end_ms - start_ms; }
  bool operator==(const TimeInterval&) const = default;
};

// Excluded intervals (merged, sorted) plus the period boundaries derived from
// the event list.
class GameTimeline {
public:
  GameTimeline() = default;
  explicit GameTimeline(std::span<const GameEvent> events);

  const std::vector<TimeInterval>& excluded() const { return excluded_; }
  bool is_excluded(std::int64_t t) const;
  // Period index in effect at t, or 0 when t precedes every PERIOD_START.
  int period_at(std::int64_t t) const;
  bool has_periods() const { return !period_starts_.empty(); }

private:
  std::vector<TimeInterval> excluded_;
  std::vector<std::pair<std::int64_t, int>> period_starts_;
};

enum class CoordinateOrigin {
  Center,  // origin at the half-court line centre
  Corner,  // origin at a court corner; shifted by half the court dimensions
};

struct TrackingSchema {
  std::string timestamp_column = "timestamp_ms";
  std::string player_column = "player_id";
  std::string x_column = "x_cm";
  std::string y_column = "y_cm";
  std::string z_column = "z_cm";
  CoordinateOrigin origin = CoordinateOrigin::Center;
  // Fraction of data rows allowed to be malformed before parsing fails.
  double malformed_tolerance = 0.01;
};

struct TrackingParse {
  std::vector<RawSample> samples;
  std::size_t rows = 0;
  std::size_t malformed = 0;
};

TrackingParse parse_tracking(std::istream& in, const TrackingSchema& schema = {});
std::vector<GameEvent> parse_events(std::istream& in);

// Samples whose timestamp lies in no excluded interval, in input order.
// Requires PRE_MATCH, POST_MATCH and at least one PERIOD_START event.
std::vector<RawSample> filter_active(std::span<const RawSample> samples,
                                     std::span<const GameEvent> events);

struct Position {
  double x_cm = 0.0;
  double y_cm = 0.0;
  bool operator==(const Position&) const = default;
};

struct Frame {
  std::int64_t timestamp_ms = 0;
  int period = 0;
  // False when this frame does not directly follow the previous one on the
  // grid (first frame, excised interval, or ticks with no fresh data).
  bool contiguous = false;
  std::map<std::string, Position> players;
};

struct FrameSeries {
  std::int64_t grid_ms = 50;
  std::vector<Frame> frames;
};

struct ResampleOptions {
  std::int64_t grid_ms = 50;
  std::int64_t staleness_ms = 500;
};

// Carries each player's last observation forward onto grid ticks that are
// multiples of grid_ms, between the first and last sample. Ticks inside an
// excluded interval are dropped and observations never cross one. Equal
// timestamps resolve to the later sample in input order.
FrameSeries resample_frames(std::span<const RawSample> samples,
                            const ResampleOptions& options,
                            const GameTimeline& timeline = {});

// Long format: frame_ms,period,contiguous,player_id,x_cm,y_cm
void write_frames_csv(std::ostream& out, const FrameSeries& series);
FrameSeries read_frames_csv(std::istream& in);

}  // namespace courtphase
