#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "qlm/report.hpp"

namespace qlm::report {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kUnitsLine = "# units: r=bohr energy=hartree";

std::string cell_text(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) return format_number(*d);
    return std::get<std::string>(c);
}

// A string is a number cell only if strtod consumes all of it.
bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

Cell cell_from_text(const std::string& s) {
    double d;
    if (parse_number(s, d)) return d;
    return s;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& s, const std::string& sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + sep.size();
    }
}

ojson cell_json(const Cell& c) { return cell_text(c); }

Cell json_cell(const ojson& j) {
    if (j.is_string()) return cell_from_text(j.get<std::string>());
    if (j.is_number()) return j.get<double>();
    throw DomainError("report: unsupported JSON value " + j.dump());
}

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const Document& doc) {
    std::ostringstream os;
    os << kUnitsLine << '\n';
    if (!doc.provenance.empty()) {
        std::vector<std::string> parts;
        for (const auto& [k, v] : doc.provenance) parts.push_back(k + "=" + cell_text(v));
        os << "# provenance: " << join(parts, "; ") << '\n';
    }
    os << "# kind: " << doc.kind << '\n';
    for (const auto& [k, v] : doc.meta) os << "# " << k << ": " << cell_text(v) << '\n';

    const bool multi = doc.sections.size() > 1;
    if (multi) {
        for (const auto& s : doc.sections) os << "# section " << s.name << ": " << join(s.columns, ",") << '\n';
        // Union of columns in first-seen order; cells a section lacks stay empty.
        std::vector<std::string> all;
        for (const auto& s : doc.sections) {
            for (const auto& c : s.columns) {
                if (std::find(all.begin(), all.end(), c) == all.end()) all.push_back(c);
            }
        }
        os << "section," << join(all, ",") << '\n';
        for (const auto& s : doc.sections) {
            for (const auto& row : s.rows) {
                std::vector<std::string> cells(all.size());
                for (std::size_t i = 0; i < s.columns.size(); ++i) {
                    const auto at = std::find(all.begin(), all.end(), s.columns[i]) - all.begin();
                    cells[static_cast<std::size_t>(at)] = csv_quote(cell_text(row[i]));
                }
                os << csv_quote(s.name) << ',' << join(cells, ",") << '\n';
            }
        }
    } else if (!doc.sections.empty()) {
        const auto& s = doc.sections.front();
        os << "# section " << s.name << ": " << join(s.columns, ",") << '\n';
        os << join(s.columns, ",") << '\n';
        for (const auto& row : s.rows) {
            std::vector<std::string> cells;
            for (const auto& c : row) cells.push_back(csv_quote(cell_text(c)));
            os << join(cells, ",") << '\n';
        }
    }
    return os.str();
}

Document parse_csv(const std::string& text) {
    Document doc;
    std::istringstream is(text);
    std::string line;
    std::vector<std::string> header;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const std::string body = line.substr(2);
            const auto colon = body.find(": ");
            if (colon == std::string::npos) continue;
            const std::string key = body.substr(0, colon);
            const std::string value = body.substr(colon + 2);
            if (key == "units") continue;
            if (key == "kind") {
                doc.kind = value;
            } else if (key == "provenance") {
                for (const auto& part : split(value, "; ")) {
                    const auto eq = part.find('=');
                    if (eq == std::string::npos) continue;
                    doc.provenance.emplace_back(part.substr(0, eq), cell_from_text(part.substr(eq + 1)));
                }
            } else if (key.rfind("section ", 0) == 0) {
                doc.sections.push_back({key.substr(8), split(value, ","), {}});
            } else {
                doc.meta.emplace_back(key, cell_from_text(value));
            }
            continue;
        }
        const auto cells = csv_split(line);
        if (!have_header) {
            header = cells;
            have_header = true;
            continue;
        }
        if (cells.size() != header.size()) throw DomainError("report: CSV row width does not match header");
        const bool multi = !header.empty() && header.front() == "section";
        Section* target = nullptr;
        std::size_t offset = 0;
        if (multi) {
            for (auto& s : doc.sections) {
                if (s.name == cells.front()) target = &s;
            }
            offset = 1;
        } else if (!doc.sections.empty()) {
            target = &doc.sections.front();
        }
        if (!target) throw DomainError("report: CSV row for an undeclared section");
        std::vector<Cell> row;
        for (const auto& col : target->columns) {
            const auto it = std::find(header.begin() + static_cast<long>(offset), header.end(), col);
            if (it == header.end()) throw DomainError("report: CSV header lacks column '" + col + "'");
            row.push_back(cell_from_text(cells[static_cast<std::size_t>(it - header.begin())]));
        }
        target->rows.push_back(std::move(row));
    }
    return doc;
}

std::string to_json(const Document& doc) {
    ojson j;
    j["kind"] = doc.kind;
    j["units"] = {{"r", "bohr"}, {"energy", "hartree"}};
    if (!doc.provenance.empty()) {
        ojson p = ojson::object();
        for (const auto& [k, v] : doc.provenance) p[k] = cell_json(v);
        j["provenance"] = p;
    }
    for (const auto& [k, v] : doc.meta) j[k] = cell_json(v);
    for (const auto& s : doc.sections) {
        ojson arr = ojson::array();
        for (const auto& row : s.rows) {
            ojson obj = ojson::object();
            for (std::size_t i = 0; i < s.columns.size(); ++i) obj[s.columns[i]] = cell_json(row[i]);
            arr.push_back(std::move(obj));
        }
        j[s.name] = {{"columns", s.columns}, {"rows", std::move(arr)}};
    }
    return j.dump(2) + "\n";
}

Document parse_json(const std::string& text) {
    const ojson j = ojson::parse(text);
    if (!j.is_object()) throw DomainError("report: JSON document must be an object");
    Document doc;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
            doc.kind = value.get<std::string>();
        } else if (key == "units") {
            continue;
        } else if (key == "provenance") {
            for (const auto& [pk, pv] : value.items()) doc.provenance.emplace_back(pk, json_cell(pv));
        } else if (value.is_object() && value.contains("rows")) {
            Section s;
            s.name = key;
            s.columns = value.at("columns").get<std::vector<std::string>>();
            for (const auto& obj : value.at("rows")) {
                std::vector<Cell> row;
                for (const auto& c : s.columns) row.push_back(json_cell(obj.at(c)));
                s.rows.push_back(std::move(row));
            }
            doc.sections.push_back(std::move(s));
        } else {
            doc.meta.emplace_back(key, json_cell(value));
        }
    }
    return doc;
}

std::string to_text(const Document& doc, int digits) {
    std::ostringstream os;
    const auto fmt = [digits](const Cell& c) {
        if (const double* d = std::get_if<double>(&c)) {
            std::ostringstream s;
            s << std::setprecision(digits) << *d;
            return s.str();
        }
        return std::get<std::string>(c);
    };
    os << doc.kind << "  (r in bohr, energies in hartree)\n";
    for (const auto& [k, v] : doc.meta) os << "  " << k << " = " << fmt(v) << '\n';
    for (const auto& s : doc.sections) {
        os << '\n';
        std::vector<std::size_t> width(s.columns.size());
        for (std::size_t i = 0; i < s.columns.size(); ++i) width[i] = s.columns[i].size();
        std::vector<std::vector<std::string>> cells;
        for (const auto& row : s.rows) {
            std::vector<std::string> line;
            for (std::size_t i = 0; i < row.size(); ++i) {
                line.push_back(fmt(row[i]));
                width[i] = std::max(width[i], line.back().size());
            }
            cells.push_back(std::move(line));
        }
        for (std::size_t i = 0; i < s.columns.size(); ++i) {
            os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << s.columns[i];
        }
        os << '\n';
        for (const auto& line : cells) {
            for (std::size_t i = 0; i < line.size(); ++i) {
                os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << line[i];
            }
            os << '\n';
        }
    }
    if (!doc.provenance.empty()) {
        os << '\n';
        for (const auto& [k, v] : doc.provenance) os << "# " << k << ": " << fmt(v) << '\n';
    }
    return os.str();
}

}  // namespace qlm::report
