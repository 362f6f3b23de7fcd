#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>

#include "tsrate/pipeline.hpp"
#include "tsrate/rating.hpp"

namespace tsrate::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;  ///< invalid config, arguments or input file
inline constexpr int kExitStage = 3;   ///< a pipeline stage failed at run time

/// Prints "OK" or one line per problem.
int cmd_validate(const std::filesystem::path& config, const RunOptions& options, std::ostream& out,
                 std::ostream& err);

/// Full pipeline; outputs land in the configured (or overridden) directory.
int cmd_run(const std::filesystem::path& config, const RunOptions& options, std::ostream& out,
            std::ostream& err);

struct RateOptions {
  std::filesystem::path scores;
  std::size_t levels = 3;
  std::optional<Direction> direction;
  TieRule rule = TieRule::kDistinct;
  std::optional<std::filesystem::path> output_dir;  ///< stdout CSV when unset
};

int cmd_rate(const RateOptions& options, std::ostream& out, std::ostream& err);

/// Writes PNGs under <output_dir>/images.
int cmd_images(const std::filesystem::path& config, const RunOptions& options, std::ostream& out,
               std::ostream& err);

}  // namespace tsrate::app
