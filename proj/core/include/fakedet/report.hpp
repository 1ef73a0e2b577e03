#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fakedet/evaluation.hpp"

namespace fakedet {

/// Header: perturbation_kind,perturbation_value,model,accuracy,f1_fake,f1_real,n,
/// followed by f1_fake_degenerate,f1_real_degenerate (0/1).
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

/// Accuracy-vs-perturbation chart for one perturbation kind, one line per
/// model, as a standalone SVG document.
std::string render_accuracy_svg(const std::vector<SweepRow>& rows, PerturbationKind kind,
                                const std::string& title);

/// Markdown table of every row.
std::string render_markdown_table(const std::vector<SweepRow>& rows);

}  // namespace fakedet
