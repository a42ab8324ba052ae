#include "dcal/frame.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "dcal/linalg.hpp"

namespace dcal {

Frame::Frame(std::vector<UnitRecord> units, std::size_t x_dim, std::size_t z_dim,
             bool with_intercept)
    : units_(std::move(units)), x_dim_(x_dim), z_dim_(z_dim) {
    if (with_intercept) {
        for (auto& u : units_) {
            u.z.insert(u.z.begin(), 1.0);
            if (u.x) u.x->insert(u.x->begin(), 1.0);
        }
        ++x_dim_;
        ++z_dim_;
    }
    b_index_.reserve(units_.size());
    for (std::size_t i = 0; i < units_.size(); ++i) {
        if (units_[i].in_b) b_index_.push_back(i);
        if (units_[i].r) ++n_b_r_;
        if (!units_[i].y) full_y_ = false;
    }
}

std::vector<std::string> validate(const Frame& frame) {
    std::vector<std::string> report;
    auto flag = [&](std::size_t i, const std::string& what) {
        report.push_back("unit " + std::to_string(i) + ": " + what);
    };
    for (std::size_t i = 0; i < frame.n_total(); ++i) {
        const UnitRecord& u = frame.unit(i);
        if (u.r && !u.in_b) flag(i, "respondent outside U_B");
        if (u.in_b && !u.x) flag(i, "covered unit lacks x-vector");
        if (!u.in_b && u.x) flag(i, "x-vector on unit outside U_B");
        if (u.x && u.x->size() != frame.x_dim())
            flag(i, "x-vector length " + std::to_string(u.x->size()) + " != " +
                        std::to_string(frame.x_dim()));
        if (u.z.size() != frame.z_dim())
            flag(i, "z-vector length " + std::to_string(u.z.size()) + " != " +
                        std::to_string(frame.z_dim()));
        if (u.r && !u.y) flag(i, "respondent without observed y");
    }
    if (frame.n_b() == 0) report.push_back("frame: no covered units (N_B = 0)");
    return report;
}

TotalsBundle compute_totals(const Frame& frame) {
    auto report = validate(frame);
    if (!report.empty()) {
        std::string msg = "invalid frame:";
        for (const auto& r : report) msg += " [" + r + "]";
        throw DataError(msg);
    }
    const std::size_t kx = frame.x_dim();
    const std::size_t kz = frame.z_dim();
    std::vector<NeumaierSum> z_all(kz), z_b(kz), x_b(kx), x_nr(kx);
    for (std::size_t i = 0; i < frame.n_total(); ++i) {
        const UnitRecord& u = frame.unit(i);
        for (std::size_t m = 0; m < kz; ++m) z_all[m].add(u.z[m]);
        if (u.in_b) {
            for (std::size_t m = 0; m < kz; ++m) z_b[m].add(u.z[m]);
            for (std::size_t k = 0; k < kx; ++k) x_b[k].add((*u.x)[k]);
            if (!u.r) {
                for (std::size_t k = 0; k < kx; ++k) x_nr[k].add((*u.x)[k]);
            }
        }
    }
    TotalsBundle totals;
    auto collect = [](const std::vector<NeumaierSum>& v) {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].value();
        return out;
    };
    totals.t_z = collect(z_all);
    totals.t_z_b = collect(z_b);
    totals.t_x_b = collect(x_b);
    totals.t_x_nr = collect(x_nr);
    return totals;
}

std::optional<double> true_y_total(const Frame& frame) {
    if (!frame.has_full_y()) return std::nullopt;
    NeumaierSum s;
    for (std::size_t i = 0; i < frame.n_total(); ++i) s.add(*frame.unit(i).y);
    return s.value();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, std::size_t row, const std::string& col) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw DataError("row " + std::to_string(row) + ", column '" + col +
                        "': cannot parse '" + s + "' as a number");
    }
    return v;
}

bool parse_flag(const std::string& s, std::size_t row, const std::string& col) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw DataError("row " + std::to_string(row) + ", column '" + col +
                    "': expected 0 or 1, got '" + s + "'");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Frame ingest_csv(std::istream& in, const ColumnMap& schema, bool with_intercept) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input: missing CSV header");
    const auto header = split_csv_line(line);
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < header.size(); ++i) pos[header[i]] = i;
    auto column = [&](const std::string& name) -> std::size_t {
        auto it = pos.find(name);
        if (it == pos.end()) throw DataError("missing column '" + name + "' in CSV header");
        return it->second;
    };

    const std::size_t c_id = column(schema.id);
    const std::size_t c_in_b = column(schema.in_b);
    const std::size_t c_r = column(schema.r);
    const std::size_t c_y = column(schema.y);
    std::vector<std::size_t> c_x, c_z;
    for (const auto& name : schema.x) c_x.push_back(column(name));
    for (const auto& name : schema.z) c_z.push_back(column(name));

    std::vector<UnitRecord> units;
    std::size_t row = 1; // header is row 1
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw DataError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        UnitRecord u;
        u.id = fields[c_id];
        u.in_b = parse_flag(fields[c_in_b], row, schema.in_b);
        u.r = parse_flag(fields[c_r], row, schema.r);
        if (u.r && !u.in_b) {
            throw DataError("row " + std::to_string(row) + ": respondent outside U_B");
        }
        const std::string& y_field = fields[c_y];
        if (y_field != schema.missing_token) {
            u.y = parse_double(y_field, row, schema.y);
        } else if (u.r) {
            throw DataError("row " + std::to_string(row) + ": respondent with missing y");
        }
        bool any_x = false;
        std::vector<double> x(c_x.size());
        for (std::size_t k = 0; k < c_x.size(); ++k) {
            const std::string& f = fields[c_x[k]];
            if (f == schema.missing_token) {
                if (u.in_b) {
                    throw DataError("row " + std::to_string(row) + ", column '" + schema.x[k] +
                                    "': missing x on a covered unit");
                }
            } else {
                any_x = true;
                x[k] = parse_double(f, row, schema.x[k]);
            }
        }
        if (u.in_b) {
            u.x = std::move(x);
        } else if (any_x) {
            throw DataError("row " + std::to_string(row) + ": x given on a unit outside U_B");
        }
        u.z.resize(c_z.size());
        for (std::size_t m = 0; m < c_z.size(); ++m) {
            u.z[m] = parse_double(fields[c_z[m]], row, schema.z[m]);
        }
        units.push_back(std::move(u));
    }
    return Frame(std::move(units), schema.x.size(), schema.z.size(), with_intercept);
}

Frame ingest_csv_file(const std::string& path, const ColumnMap& schema, bool with_intercept) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file '" + path + "'");
    return ingest_csv(in, schema, with_intercept);
}

void export_csv(const Frame& frame, const ColumnMap& schema, std::ostream& out) {
    if (schema.x.size() != frame.x_dim() || schema.z.size() != frame.z_dim()) {
        throw DataError("schema dimensions (" + std::to_string(schema.x.size()) + ", " +
                        std::to_string(schema.z.size()) + ") do not match frame (" +
                        std::to_string(frame.x_dim()) + ", " + std::to_string(frame.z_dim()) +
                        ")");
    }
    out << schema.id << ',' << schema.in_b << ',' << schema.r << ',' << schema.y;
    for (const auto& name : schema.x) out << ',' << name;
    for (const auto& name : schema.z) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < frame.n_total(); ++i) {
        const UnitRecord& u = frame.unit(i);
        out << u.id << ',' << (u.in_b ? '1' : '0') << ',' << (u.r ? '1' : '0') << ',';
        out << (u.y ? format_double(*u.y) : schema.missing_token);
        for (std::size_t k = 0; k < frame.x_dim(); ++k) {
            out << ',';
            if (u.x) out << format_double((*u.x)[k]);
            else out << schema.missing_token;
        }
        for (std::size_t m = 0; m < frame.z_dim(); ++m) {
            out << ',' << format_double(u.z[m]);
        }
        out << '\n';
    }
}

} // namespace dcal
