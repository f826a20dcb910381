#pragma once

// File formats.
//
// Rankings text: one ranking per line, labels separated by spaces and/or
// commas, '#' starts a comment line, blank lines are skipped. Every data line
// must be a permutation of the label set inferred from the first data line.
//
// Grades CSV: header row of lesson names (first cell names the label column),
// then one row per student: label, then one numeric grade per lesson.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rankagg/core.hpp"

namespace rankagg {

struct ParsedRankings {
    std::shared_ptr<const SymbolTable> table;
    std::vector<Ranking> rankings;
};

inline std::vector<std::string> split_ranking_line(const std::string& line) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : line) {
        if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

inline ParsedRankings parse_rankings_text(std::istream& in) {
    ParsedRankings out;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] == '#') continue;
        auto tokens = split_ranking_line(line);
        if (tokens.empty()) continue;
        try {
            if (!out.table) out.table = SymbolTable::intern(tokens);
            out.rankings.push_back(Ranking::from_labels(out.table, tokens));
        } catch (const Error& e) {
            fail(Errc::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!out.table) fail(Errc::ParseError, "no rankings found in input");
    return out;
}

inline void write_ranking_line(std::ostream& out, const Ranking& r) {
    bool first = true;
    for (const std::string& label : r.real_labels()) {
        if (!first) out << ' ';
        out << label;
        first = false;
    }
    out << '\n';
}

struct GradeTable {
    std::vector<std::string> lessons;
    std::vector<std::string> students;
    std::vector<std::vector<double>> grades;  // row per student
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    cells.push_back(current);
    for (auto& cell : cells) {
        const auto begin = cell.find_first_not_of(" \t");
        const auto end = cell.find_last_not_of(" \t");
        cell = begin == std::string::npos ? std::string{} : cell.substr(begin, end - begin + 1);
    }
    return cells;
}

}  // namespace detail

inline GradeTable parse_grades_csv(std::istream& in) {
    GradeTable table;
    std::string line;
    std::int64_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto cells = detail::split_csv_line(line);
        if (!have_header) {
            if (cells.size() < 2) fail(Errc::ParseError, "grades header needs at least one lesson column");
            table.lessons.assign(cells.begin() + 1, cells.end());
            have_header = true;
            continue;
        }
        if (cells.size() != table.lessons.size() + 1)
            fail(Errc::RaggedRows, "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(table.lessons.size() + 1) + " cells, got " +
                                       std::to_string(cells.size()));
        table.students.push_back(cells[0]);
        std::vector<double> row;
        row.reserve(cells.size() - 1);
        for (std::size_t i = 1; i < cells.size(); ++i) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(cells[i], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cells[i].size() || cells[i].empty())
                fail(Errc::NonNumericGrade,
                     "line " + std::to_string(line_no) + ": grade '" + cells[i] + "' is not numeric");
            row.push_back(value);
        }
        table.grades.push_back(std::move(row));
    }
    if (!have_header || table.students.empty()) fail(Errc::ParseError, "grades file has no data rows");
    return table;
}

}  // namespace rankagg
