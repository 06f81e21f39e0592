#pragma once

#include <stdexcept>
#include <string>

namespace corpuseng {

// Configuration or input problems detected before any stage runs.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Executes the stage list from a JSON config file. Writes one report per
// stage plus a manifest of input/output digests into the report directory.
// Throws ValidationError before any stage has run; stage failures carry the
// failing stage name.
void run_pipeline(const std::string& config_path);

// Runs one stage described by a JSON object (the same schema as entries of
// the config's "stages" array). Returns the stage report as JSON text.
std::string run_stage(const std::string& stage_json, int threads,
                      std::uint64_t default_seed);

}  // namespace corpuseng
