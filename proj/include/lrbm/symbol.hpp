#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace lrbm {

// Interned identifier. Ids are process-wide; ordering between symbols follows
// interning order, so anything user-visible is sorted by str() instead.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view text);

  std::uint32_t id() const { return id_; }
  const std::string& str() const;
  bool empty() const { return id_ == 0; }

  friend bool operator==(Symbol, Symbol) = default;
  friend auto operator<=>(Symbol, Symbol) = default;

 private:
  std::uint32_t id_ = 0;
};

}  // namespace lrbm

template <>
struct std::hash<lrbm::Symbol> {
  std::size_t operator()(lrbm::Symbol s) const noexcept { return s.id(); }
};
