#ifndef UDSEG_COMMANDS_HPP
#define UDSEG_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace udseg {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resolved command-line configuration. Explicit flags override a settings
// file, which overrides the recommended defaults.
struct RunConfig {
    std::string train_path;
    std::string dev_path;
    std::string model_dir;
    std::string input_path;
    std::string output_path;
    std::string gold_path;
    std::string system_path;
    std::string report_path;
    std::string f1_table_path;
    std::string settings_path;
    std::string dump_tags_path;
    std::vector<std::string> analyze_inputs;

    std::uint64_t seed = 1;
    std::optional<int> epochs;
    std::optional<int> encdec_epochs;
    std::optional<std::string> unit_mode;
    std::optional<bool> ngrams;
    std::optional<std::size_t> mwt_threshold;
    bool presegmented = true;
};

void cmd_train(const RunConfig& cfg);
void cmd_segment(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg);
void cmd_analyze(const RunConfig& cfg);
void cmd_recommend(const RunConfig& cfg);

}  // namespace udseg

#endif
