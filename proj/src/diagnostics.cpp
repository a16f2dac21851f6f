#include "alps/diagnostics.hpp"

namespace alps {

std::string to_string(MoveType t) {
  switch (t) {
    case MoveType::rwm: return "rwm";
    case MoveType::leap_local: return "leap_local";
    case MoveType::leap: return "leap";
    case MoveType::quanta_swap: return "quanta_swap";
    case MoveType::standard_swap: return "standard_swap";
    case MoveType::hot: return "hot";
  }
  return "unknown";
}

MoveCounter& MoveCounter::operator+=(const MoveCounter& o) {
  proposed += o.proposed;
  accepted += o.accepted;
  nonfinite += o.nonfinite;
  return *this;
}

void CounterTable::record(MoveType type, int level, const MoveResult& r) {
  auto& c = entries_[{type, level}];
  ++c.proposed;
  if (r.accepted) ++c.accepted;
  if (!r.finite) ++c.nonfinite;
}

void CounterTable::add(MoveType type, int level, const MoveCounter& c) {
  entries_[{type, level}] += c;
}

MoveCounter CounterTable::get(MoveType type, int level) const {
  const auto it = entries_.find({type, level});
  return it == entries_.end() ? MoveCounter{} : it->second;
}

MoveCounter CounterTable::total(MoveType type) const {
  MoveCounter out;
  for (const auto& [key, c] : entries_) {
    if (key.first == type) out += c;
  }
  return out;
}

nlohmann::json CounterTable::to_json() const {
  nlohmann::json by_move = nlohmann::json::object();
  for (const auto& [key, c] : entries_) {
    by_move[to_string(key.first)].push_back({{"level", key.second},
                                              {"proposed", c.proposed},
                                              {"accepted", c.accepted},
                                              {"rejected", c.rejected()},
                                              {"nonfinite", c.nonfinite},
                                              {"rate", c.rate()}});
  }
  nlohmann::json totals = nlohmann::json::object();
  for (MoveType t : {MoveType::rwm, MoveType::leap_local, MoveType::leap, MoveType::quanta_swap,
                     MoveType::standard_swap, MoveType::hot}) {
    const MoveCounter c = total(t);
    if (c.proposed == 0) continue;
    totals[to_string(t)] = {{"proposed", c.proposed}, {"accepted", c.accepted}, {"rate", c.rate()}};
  }
  return {{"by_level", by_move}, {"totals", totals}};
}

std::map<int, std::uint64_t> visit_counts(const std::vector<int>& labels, std::size_t from) {
  std::map<int, std::uint64_t> out;
  for (std::size_t i = from; i < labels.size(); ++i) ++out[labels[i]];
  return out;
}

std::uint64_t label_switches(const std::vector<int>& labels, std::size_t from) {
  std::uint64_t n = 0;
  for (std::size_t i = from + 1; i < labels.size(); ++i) {
    if (labels[i] != labels[i - 1]) ++n;
  }
  return n;
}

}  // namespace alps
