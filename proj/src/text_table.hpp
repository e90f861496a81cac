#pragma once

#include <string>
#include <vector>

namespace catamerge::detail {

/// Left-aligned plain-text table with two spaces between columns.
class TextTable
{
  public:
    explicit TextTable(std::vector<std::string> header) : rows_{std::move(header)} { }

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string render() const
    {
        std::vector<std::size_t> width;
        for (const auto &r : rows_)
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (width.size() <= i) width.push_back(0);
                width[i] = std::max(width[i], r[i].size());
            }
        std::string out;
        for (const auto &r : rows_) {
            std::string line;
            for (std::size_t i = 0; i < r.size(); ++i) {
                line += r[i];
                if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
            }
            out += line + "\n";
        }
        return out;
    }

  private:
    std::vector<std::vector<std::string>> rows_;
};

} // namespace catamerge::detail
