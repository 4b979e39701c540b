#pragma once

// Lockstep execution of per-agent programs. Each agent sees only its
// AgentContext: its ID, N, the parity flag, the model and its own feedback.

#include "ringsync/ring.hpp"
#include "ringsync/task.hpp"

#include <bit>
#include <cmath>
#include <coroutine>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringsync {

struct RoundLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Some agents finished while others still wanted to move.
struct DesyncError : std::logic_error {
  using std::logic_error::logic_error;
};

// A protocol input did not satisfy the protocol's precondition.
struct PreconditionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HistoryEntry {
  Direction logical;      // as requested by the program
  Direction own;          // the same choice in the agent's own sense
  RoundFeedback feedback; // expressed in the agent's logical sense at that time
};

// Bit width used for IDs in [1, cap_N]: ids are written as (id - 1) in
// ceil(log2 cap_N) bits, most significant first.
inline int id_width(int cap_N) {
  int w = 0;
  while ((1LL << w) < cap_N) ++w;
  return w;
}

inline int ceil_log2(long long x) {
  int w = 0;
  while ((1LL << w) < x) ++w;
  return w;
}

class AgentContext {
 public:
  AgentContext(int id, int cap_N, std::optional<bool> n_is_odd, ModelKind model)
      : id_(id), cap_N_(cap_N), n_is_odd_(n_is_odd), model_(model) {}

  int id() const { return id_; }
  int cap_N() const { return cap_N_; }
  std::optional<bool> n_is_odd() const { return n_is_odd_; }
  ModelKind model() const { return model_; }
  const std::vector<HistoryEntry>& history() const { return history_; }
  std::size_t rounds() const { return history_.size(); }

  int width() const { return id_width(cap_N_); }
  // Bit i (0 = most significant) of id - 1.
  bool id_bit(int i) const { return ((id_ - 1) >> (width() - 1 - i)) & 1; }

  // Logical sense: after flip_sense() the agent's "right" is its own left.
  bool sense_flipped() const { return flipped_; }
  void flip_sense() { flipped_ = !flipped_; }

  // Current position relative to the starting one, in the logical sense, in [0, 1).
  Rational offset() const { return flipped_ ? mod_one(-own_offset_) : own_offset_; }

  struct RoundAwaiter {
    AgentContext& ctx;
    Direction logical;
    bool await_ready() const noexcept { return false; }
    void await_suspend(std::coroutine_handle<> h) {
      ctx.pending_ = logical;
      ctx.waiting_ = h;
    }
    RoundFeedback await_resume() { return ctx.history_.back().feedback; }
  };

  // Suspends until the round has been executed; returns the feedback.
  RoundAwaiter round(Direction logical) { return RoundAwaiter{*this, logical}; }

  // The logical direction that physically repeats a past own-sense choice.
  Direction logical_for_own(Direction own) const { return flipped_ ? opposite(own) : own; }

 private:
  template <class T>
  friend class Runner;

  Direction own_direction() const { return flipped_ ? opposite(*pending_) : *pending_; }

  void deliver(const RoundFeedback& own) {
    own_offset_ = mod_one(own_offset_ + own.dist);
    RoundFeedback logical = own;
    if (flipped_) logical.dist = mod_one(-own.dist);
    history_.push_back({*pending_, own_direction(), logical});
    pending_.reset();
    auto h = std::exchange(waiting_, {});
    h.resume();
  }

  int id_;
  int cap_N_;
  std::optional<bool> n_is_odd_;
  ModelKind model_;
  bool flipped_ = false;
  Rational own_offset_ = 0;
  std::vector<HistoryEntry> history_;
  std::optional<Direction> pending_;
  std::coroutine_handle<> waiting_;
};

// The protocols assume more than four agents; agents cannot check this themselves.
inline void check_paper_size(const RingConfig& config) {
  if (config.size() <= 4)
    throw InvalidConfig("protocols need n > 4, got n = " + std::to_string(config.size()));
}

inline std::size_t default_max_rounds(std::size_t n, int cap_N) {
  const std::size_t lg = static_cast<std::size_t>(ceil_log2(cap_N));
  return 64 * (n + lg * lg);
}

template <class T>
struct RunResult {
  std::vector<T> outcomes;  // indexed like RingConfig agents
  std::size_t rounds = 0;
  RingConfig final_config;
  std::vector<std::vector<HistoryEntry>> transcripts;
  std::vector<bool> final_flipped;
};

// Observer called after every round with the world before it, the executed
// objective round and its result. Never visible to agents.
using RoundObserver = std::function<void(const RingConfig&, const RoundSpec&, const RoundResult&)>;

template <class T>
class Runner {
 public:
  using Program = std::function<Task<T>(AgentContext&)>;

  Runner(RingConfig config, ModelKind model, Program program, std::size_t max_rounds = 0)
      : config_(std::move(config)), model_(model), program_(std::move(program)),
        max_rounds_(max_rounds ? max_rounds : default_max_rounds(config_.size(), config_.cap_N)) {
    config_.validate();
  }

  void set_observer(RoundObserver obs) { observer_ = std::move(obs); }

  RunResult<T> run() {
    const std::size_t n = config_.size();
    std::optional<bool> parity;
    if (config_.parity_known) parity = (n % 2 == 1);
    std::vector<std::unique_ptr<AgentContext>> ctx;
    std::vector<Task<T>> tasks;
    for (std::size_t i = 0; i < n; ++i) {
      ctx.push_back(std::make_unique<AgentContext>(config_.ids[i], config_.cap_N, parity, model_));
      tasks.push_back(program_(*ctx.back()));
    }
    for (auto& t : tasks) t.resume();

    RingConfig world = config_;
    std::size_t rounds = 0;
    for (;;) {
      for (auto& t : tasks)
        if (t.failed()) t.result();  // rethrows the agent's error
      std::size_t finished = 0;
      for (auto& t : tasks) finished += t.done();
      if (finished == n) break;
      if (finished != 0)
        throw DesyncError("agents disagree on protocol length after " + std::to_string(rounds) + " rounds");
      if (rounds >= max_rounds_)
        throw RoundLimitExceeded("round limit " + std::to_string(max_rounds_) + " exceeded");

      RoundSpec spec{{}, model_};
      for (std::size_t i = 0; i < n; ++i) {
        const Direction own = ctx[i]->own_direction();
        if (own == Direction::Idle && model_ != ModelKind::Lazy)
          throw ModelViolation("agent " + std::to_string(config_.ids[i]) + " chose idle outside the lazy model");
        spec.directions.push_back(resolve(own, world.chirality[i]));
      }
      RoundResult res = execute_round(world, spec);
      ++rounds;
      if (observer_) observer_(world, spec, res);
      world = res.next;
      for (std::size_t i = 0; i < n; ++i) ctx[i]->deliver(res.feedback[i]);
    }

    RunResult<T> out;
    out.rounds = rounds;
    out.final_config = world;
    for (std::size_t i = 0; i < n; ++i) {
      out.outcomes.push_back(tasks[i].result());
      out.transcripts.push_back(ctx[i]->history());
      out.final_flipped.push_back(ctx[i]->sense_flipped());
    }
    return out;
  }

 private:
  RingConfig config_;
  ModelKind model_;
  Program program_;
  std::size_t max_rounds_;
  RoundObserver observer_;
};

template <class T>
RunResult<T> run_agents(const RingConfig& config, ModelKind model,
                        std::function<Task<T>(AgentContext&)> program, std::size_t max_rounds = 0,
                        RoundObserver observer = {}) {
  Runner<T> r(config, model, std::move(program), max_rounds);
  if (observer) r.set_observer(std::move(observer));
  return r.run();
}

}  // namespace ringsync
