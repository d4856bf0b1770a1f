#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcouple {

/// A set D of non-negative integers: a finite list, an interval (possibly
/// unbounded above), or the complement of a finite list.
class SetSpec {
 public:
  enum class Kind { Explicit, Interval, Complement };

  /// Members are sorted and deduplicated.
  static SetSpec explicit_set(std::vector<std::uint64_t> members);
  /// Throws DomainError when hi < lo.
  static SetSpec interval(std::uint64_t lo, std::optional<std::uint64_t> hi = std::nullopt);
  static SetSpec complement_of(std::vector<std::uint64_t> members);
  static SetSpec everything() { return interval(0); }

  /// Parses the shell syntax `0,2,5`, `3..`, `3..7` and `!0,1`. An empty
  /// string is the empty set. Throws DomainError on malformed input.
  static SetSpec parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  const std::vector<std::uint64_t>& members() const noexcept { return members_; }
  std::uint64_t lo() const noexcept { return lo_; }
  std::optional<std::uint64_t> hi() const noexcept { return hi_; }

  bool contains(std::uint64_t k) const noexcept;

  /// Largest integer whose membership has to be looked up explicitly; every
  /// k above it behaves the same way. Empty for the empty set.
  std::optional<std::uint64_t> max_finite_point() const noexcept;

  SetSpec complement() const;

  /// Inverse of parse().
  std::string to_string() const;

  friend bool operator==(const SetSpec&, const SetSpec&) = default;

 private:
  SetSpec() = default;

  Kind kind_ = Kind::Explicit;
  std::vector<std::uint64_t> members_;
  std::uint64_t lo_ = 0;
  std::optional<std::uint64_t> hi_;
};

}  // namespace pcouple
