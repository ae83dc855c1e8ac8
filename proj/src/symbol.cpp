#include "lrbm/symbol.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace lrbm {
namespace {

class SymbolTable {
 public:
  SymbolTable() { intern(""); }

  std::uint32_t intern(std::string_view text) {
    {
      std::shared_lock lock(mu_);
      if (auto it = ids_.find(text); it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mu_);
    if (auto it = ids_.find(text); it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(texts_.size());
    texts_.emplace_back(text);
    ids_.emplace(texts_.back(), id);
    return id;
  }

  // deque::emplace_back never invalidates references to existing elements.
  const std::string& text(std::uint32_t id) const {
    std::shared_lock lock(mu_);
    return texts_[id];
  }

 private:
  mutable std::shared_mutex mu_;
  std::deque<std::string> texts_;
  std::unordered_map<std::string_view, std::uint32_t> ids_;
};

SymbolTable& table() {
  static SymbolTable instance;
  return instance;
}

}  // namespace

Symbol::Symbol(std::string_view text) : id_(table().intern(text)) {}

const std::string& Symbol::str() const { return table().text(id_); }

}  // namespace lrbm
