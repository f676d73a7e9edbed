#pragma once

#include <string>
#include <vector>

#include "cma/alpha.hpp"
#include "cma/sim.hpp"
#include "cma/value_iteration.hpp"

namespace cma {

std::string to_json(const ValueFunction& vf);
ValueFunction value_function_from_json(const std::string& text);

std::string to_json(const AlphaSet& set, double p_obs);
// Returns the alpha set and writes the stored p_obs through `p_obs`.
AlphaSet alpha_set_from_json(const std::string& text, double* p_obs);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// Minimal RFC-4180 CSV writer: comma separated, header row, fields quoted
// when they contain a comma, quote, or newline.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(const std::vector<std::string>& fields);
    const std::string& str() const { return out_; }

    static std::string escape(const std::string& field);
    // Shortest round-trip decimal formatting (stable across runs).
    static std::string num(double v);
    static std::string num(std::uint64_t v);
    static std::string num(int v);

  private:
    std::size_t n_columns_;
    std::string out_;
};

}  // namespace cma
