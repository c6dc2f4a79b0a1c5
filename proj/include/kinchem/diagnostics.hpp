// Per-step diagnostics table shared by the Eulerian and particle solvers.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinchem {

struct DiagnosticsSeries {
    struct Column {
        std::string name;
        std::string unit;
        std::string description;
    };
    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i].name == name) return i;
        throw std::out_of_range("diagnostics: no column named '" + name + "'");
    }
    bool has_column(const std::string& name) const {
        for (const auto& c : columns)
            if (c.name == name) return true;
        return false;
    }
    std::vector<double> column(const std::string& name) const {
        const std::size_t j = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[j]);
        return out;
    }
};

}  // namespace kinchem
