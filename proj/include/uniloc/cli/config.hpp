#pragma once

#include <string>
#include <string_view>

#include "uniloc/eval.hpp"
#include "uniloc/fusion.hpp"
#include "uniloc/synth.hpp"

namespace uniloc::cli {

// Everything a command may need, settable by key. Files hold one
// `key = value` pair per line; `#` starts a comment.
struct RunConfig {
  SceneConfig scene;
  SensorNoise noise;
  FusionSolverConfig solver;
  EvalConfig eval;

  // Throws ConfigError for unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  void apply_text(std::string_view text);
  void apply_override(std::string_view assignment);  // "key=value"

  // Every key with its resolved value, in a fixed order.
  std::string dump() const;
};

RunConfig load_config(const std::string& path);

}  // namespace uniloc::cli
