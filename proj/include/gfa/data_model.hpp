#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gfa {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Column layout of the concatenated data matrix: M views of widths D_1..D_M.
class ViewPartition {
public:
    ViewPartition() = default;
    /// Names default to "view0", "view1", ... when empty.
    explicit ViewPartition(std::vector<Index> dims, std::vector<std::string> names = {});

    Index view_count() const { return static_cast<Index>(dims_.size()); }
    Index total_dim() const { return offsets_.empty() ? 0 : offsets_.back(); }
    Index dim(Index m) const { return dims_.at(m); }
    Index offset(Index m) const { return offsets_.at(m); }
    const std::vector<Index>& dims() const { return dims_; }
    const std::vector<std::string>& names() const { return names_; }

    bool operator==(const ViewPartition& other) const { return dims_ == other.dims_; }

private:
    std::vector<Index> dims_;
    std::vector<std::string> names_;
    std::vector<Index> offsets_;  // size M + 1
};

/// N co-occurring samples over M views, stored as one N x D matrix with
/// samples as rows. Immutable after construction.
class DataCollection {
public:
    DataCollection(ViewPartition partition, Matrix data);

    const ViewPartition& partition() const { return partition_; }
    const Matrix& data() const { return data_; }
    Index n_samples() const { return data_.rows(); }
    Index view_count() const { return partition_.view_count(); }

    auto view(Index m) const {
        return data_.middleCols(partition_.offset(m), partition_.dim(m));
    }

private:
    ViewPartition partition_;
    Matrix data_;
};

struct PreprocessRecord {
    Vector means;
    /// Empty when scaling was not requested.
    Vector scales;
    /// Columns with zero variance whose scale was forced to 1.
    std::vector<Index> constant_columns;

    bool scaled() const { return scales.size() > 0; }
};

DataCollection load_collection(const std::filesystem::path& manifest_path);

/// Writes `manifest.json` plus one CSV per view into `directory`.
/// Values use the shortest representation that round-trips exactly.
void save_collection(const DataCollection& collection, const std::filesystem::path& directory);

std::pair<DataCollection, PreprocessRecord> center(const DataCollection& collection,
                                                   bool scale_to_unit_variance);

Matrix read_csv(const std::filesystem::path& path, bool header);
void write_csv(const std::filesystem::path& path, const Matrix& values,
               const std::vector<std::string>& header = {});

/// Shortest decimal form of `value` that parses back to the same double.
std::string format_double(double value);

}  // namespace gfa
