#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dcal/error.hpp"

namespace dcal {

/// One population unit. z is known for every unit; x only for units inside
/// the covered sub-population B; y only where observed (respondents in real
/// data, everywhere in simulated frames that carry the truth).
struct UnitRecord {
    std::string id;
    bool in_b = false;
    bool r = false; // respondent-stratum member; implies in_b
    std::optional<std::vector<double>> x;
    std::vector<double> z;
    std::optional<double> y;
};

/// Column totals used by the estimators and diagnostics: register totals
/// t_z (whole population) and t_z_b, t_x_b (covered sub-population), plus
/// t_x_nr over covered nonrespondents (diagnostics only).
struct TotalsBundle {
    std::vector<double> t_z;
    std::vector<double> t_z_b;
    std::vector<double> t_x_b;
    std::vector<double> t_x_nr;
};

/// Immutable population frame. After construction it is safe to share
/// across threads for reading.
class Frame {
public:
    /// Takes ownership of the unit records. When with_intercept is set, a
    /// leading constant 1 is prepended to every z-vector and every present
    /// x-vector (and the dimensions grow by one).
    Frame(std::vector<UnitRecord> units, std::size_t x_dim, std::size_t z_dim,
          bool with_intercept = false);

    std::size_t n_total() const noexcept { return units_.size(); }
    std::size_t x_dim() const noexcept { return x_dim_; }
    std::size_t z_dim() const noexcept { return z_dim_; }

    const UnitRecord& unit(std::size_t i) const { return units_[i]; }

    /// Number of units in the covered sub-population B.
    std::size_t n_b() const noexcept { return b_index_.size(); }
    /// Number of respondent-stratum units.
    std::size_t n_b_r() const noexcept { return n_b_r_; }

    /// Global index of the k-th covered unit (frame order); sample draws
    /// index into this ordering.
    std::size_t b_unit_index(std::size_t k) const { return b_index_[k]; }
    const UnitRecord& b_unit(std::size_t k) const { return units_[b_index_[k]]; }

    /// True when every unit carries y (simulated frames).
    bool has_full_y() const noexcept { return full_y_; }

private:
    std::vector<UnitRecord> units_;
    std::vector<std::size_t> b_index_;
    std::size_t x_dim_;
    std::size_t z_dim_;
    std::size_t n_b_r_ = 0;
    bool full_y_ = true;
};

/// Structural invariant check. Returns one message per violation (empty
/// means valid); never throws, never mutates.
std::vector<std::string> validate(const Frame& frame);

/// Exact column sums over the stated subsets. Throws DataError when the
/// frame fails validation.
TotalsBundle compute_totals(const Frame& frame);

/// Sum of y over the whole frame; available only when every unit carries y.
std::optional<double> true_y_total(const Frame& frame);

/// Maps CSV columns to frame fields. x and z list one column name per
/// component; the missing token marks absent y (and absent x outside B).
struct ColumnMap {
    std::string id = "id";
    std::string in_b = "in_b";
    std::string r = "r";
    std::string y = "y";
    std::vector<std::string> x;
    std::vector<std::string> z;
    std::string missing_token; // default: empty field
};

/// Reads a frame from CSV (header row required). Rows violating the frame
/// invariants — a respondent without y, x outside B, a respondent outside
/// B — are rejected with the row number. Set with_intercept to prepend the
/// unit constant on load.
Frame ingest_csv(std::istream& in, const ColumnMap& schema, bool with_intercept = false);
Frame ingest_csv_file(const std::string& path, const ColumnMap& schema,
                      bool with_intercept = false);

/// Writes a frame as CSV under the same schema; numeric fields carry enough
/// digits to round-trip bit-identically through ingest_csv.
void export_csv(const Frame& frame, const ColumnMap& schema, std::ostream& out);

} // namespace dcal
