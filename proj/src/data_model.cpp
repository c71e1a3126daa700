#include "gfa/data_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gfa/error.hpp"

namespace gfa {

namespace fs = std::filesystem;

ViewPartition::ViewPartition(std::vector<Index> dims, std::vector<std::string> names)
    : dims_(std::move(dims)), names_(std::move(names)) {
    if (dims_.empty()) throw UsageError("a view partition needs at least one view");
    if (names_.empty()) {
        for (std::size_t m = 0; m < dims_.size(); ++m) names_.push_back("view" + std::to_string(m));
    }
    if (names_.size() != dims_.size())
        throw UsageError("view partition has " + std::to_string(dims_.size()) + " dims but " +
                         std::to_string(names_.size()) + " names");
    offsets_.assign(1, 0);
    for (Index d : dims_) {
        if (d < 1) throw UsageError("view dimensions must be positive");
        offsets_.push_back(offsets_.back() + d);
    }
}

DataCollection::DataCollection(ViewPartition partition, Matrix data)
    : partition_(std::move(partition)), data_(std::move(data)) {
    if (data_.rows() < 2) throw UsageError("a data collection needs at least 2 samples");
    if (data_.cols() != partition_.total_dim())
        throw UsageError("data has " + std::to_string(data_.cols()) +
                         " columns but the views declare " +
                         std::to_string(partition_.total_dim()));
    if (!data_.allFinite()) throw UsageError("data contains non-finite values");
}

std::string format_double(double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

double parse_cell(std::string cell, const fs::path& path, std::size_t row, std::size_t col) {
    const auto first = cell.find_first_not_of(" \t");
    const auto last = cell.find_last_not_of(" \t");
    if (first == std::string::npos)
        throw IoError(path.string() + ": empty cell at row " + std::to_string(row + 1) +
                      ", column " + std::to_string(col + 1));
    cell = cell.substr(first, last - first + 1);
    if (!cell.empty() && cell.front() == '+') cell.erase(0, 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value))
        throw IoError(path.string() + ": non-numeric cell '" + cell + "' at row " +
                      std::to_string(row + 1) + ", column " + std::to_string(col + 1));
    return value;
}

}  // namespace

Matrix read_csv(const fs::path& path, bool header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    bool skip = header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skip) {
            skip = false;
            continue;
        }
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto fields = split_fields(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c)
            row.push_back(parse_cell(fields[c], path, rows.size(), c));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError(path.string() + ": row " + std::to_string(rows.size() + 1) + " has " +
                          std::to_string(row.size()) + " fields, expected " +
                          std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(path.string() + ": empty view");
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < out.rows(); ++i)
        for (Index j = 0; j < out.cols(); ++j) out(i, j) = rows[i][j];
    return out;
}

void write_csv(const fs::path& path, const Matrix& values, const std::vector<std::string>& header) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
        out << '\n';
    }
    for (Index i = 0; i < values.rows(); ++i) {
        for (Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

DataCollection load_collection(const fs::path& manifest_path) {
    fs::path manifest_file = manifest_path;
    if (fs::is_directory(manifest_file)) manifest_file /= "manifest.json";
    std::ifstream in(manifest_file);
    if (!in) throw IoError("cannot open manifest " + manifest_file.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(manifest_file.string() + ": " + e.what());
    }
    if (!manifest.contains("views") || !manifest["views"].is_array() || manifest["views"].empty())
        throw IoError(manifest_file.string() + ": manifest needs a non-empty \"views\" array");
    const bool header = manifest.value("csv_header", false);
    const fs::path base = manifest_file.parent_path();

    std::vector<Matrix> blocks;
    std::vector<Index> dims;
    std::vector<std::string> names;
    for (const auto& view : manifest["views"]) {
        if (!view.contains("file")) throw IoError(manifest_file.string() + ": view without \"file\"");
        const fs::path file = base / view["file"].get<std::string>();
        if (!fs::exists(file)) throw IoError("missing view file " + file.string());
        blocks.push_back(read_csv(file, header));
        names.push_back(view.value("name", "view" + std::to_string(names.size())));
        dims.push_back(blocks.back().cols());
        if (blocks.back().rows() != blocks.front().rows())
            throw IoError("row-count mismatch: view '" + names.back() + "' has " +
                          std::to_string(blocks.back().rows()) + " rows, view '" + names.front() +
                          "' has " + std::to_string(blocks.front().rows()));
    }
    ViewPartition partition(dims, names);
    Matrix data(blocks.front().rows(), partition.total_dim());
    for (std::size_t m = 0; m < blocks.size(); ++m)
        data.middleCols(partition.offset(static_cast<Index>(m)), blocks[m].cols()) = blocks[m];
    return DataCollection(std::move(partition), std::move(data));
}

void save_collection(const DataCollection& collection, const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
    nlohmann::json manifest;
    manifest["csv_header"] = false;
    manifest["views"] = nlohmann::json::array();
    const auto& partition = collection.partition();
    for (Index m = 0; m < partition.view_count(); ++m) {
        const std::string file = partition.names()[m] + ".csv";
        write_csv(directory / file, collection.view(m));
        manifest["views"].push_back({{"name", partition.names()[m]}, {"file", file}});
    }
    std::ofstream out(directory / "manifest.json");
    if (!out) throw IoError("cannot write manifest in " + directory.string());
    out << manifest.dump(2) << '\n';
}

std::pair<DataCollection, PreprocessRecord> center(const DataCollection& collection,
                                                   bool scale_to_unit_variance) {
    const Index n = collection.n_samples();
    if (n < 2) throw UsageError("centering needs at least 2 samples");
    PreprocessRecord record;
    Matrix data = collection.data();
    record.means = data.colwise().mean().transpose();
    data.rowwise() -= record.means.transpose();
    // A second pass removes the rounding residue of the first subtraction.
    const Vector residue = data.colwise().mean().transpose();
    data.rowwise() -= residue.transpose();
    record.means += residue;
    if (scale_to_unit_variance) {
        record.scales.resize(data.cols());
        for (Index j = 0; j < data.cols(); ++j) {
            const double var = data.col(j).squaredNorm() / static_cast<double>(n - 1);
            if (var > 0.0) {
                record.scales(j) = std::sqrt(var);
                data.col(j) /= record.scales(j);
            } else {
                record.scales(j) = 1.0;
                record.constant_columns.push_back(j);
            }
        }
    }
    return {DataCollection(collection.partition(), std::move(data)), std::move(record)};
}

}  // namespace gfa
