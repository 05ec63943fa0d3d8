#include "inclab/covariance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "inclab/rng.hpp"

namespace inclab {

namespace {

double smallest_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

CovMatrix CovMatrix::from_entries(Eigen::MatrixXd entries, double psd_tol) {
  const auto rows = entries.rows();
  if (rows == 0 || rows != entries.cols()) {
    throw ValidationError("covariance matrix must be square and non-empty, got " +
                          std::to_string(rows) + "x" + std::to_string(entries.cols()));
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (entries(i, i) != 1.0) {
      throw ValidationError("unit-diagonal violation at index " + std::to_string(i) +
                            ": " + std::to_string(entries(i, i)));
    }
    for (Eigen::Index j = i + 1; j < rows; ++j) {
      if (entries(i, j) != entries(j, i)) {
        throw ValidationError("symmetry violation at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
      if (std::abs(entries(i, j)) > 1.0) {
        throw ValidationError("off-diagonal entry out of [-1, 1] at (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
      }
    }
  }
  const double min_eig = smallest_eigenvalue(entries);
  if (min_eig < -psd_tol) {
    throw ValidationError("matrix is not positive semidefinite: smallest eigenvalue " +
                          std::to_string(min_eig));
  }
  return CovMatrix(std::move(entries), min_eig);
}

Eigen::MatrixXd CovMatrix::block(const std::vector<int>& rows, const std::vector<int>& cols) const {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) {
      out(a, b) = entries_(rows[a], cols[b]);
    }
  }
  return out;
}

Eigen::VectorXd CovMatrix::sub_column(const std::vector<int>& rows, int j) const {
  Eigen::VectorXd out(rows.size());
  for (std::size_t a = 0; a < rows.size(); ++a) out[a] = entries_(rows[a], j);
  return out;
}

bool CovMatrix::is_identity() const {
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < entries_.cols(); ++j) {
      if (entries_(i, j) != 0.0) return false;
    }
  }
  return true;
}

CovMatrix identity_cov(int p) {
  if (p < 1) throw ValidationError("dimension must be at least 1");
  return CovMatrix::from_entries(Eigen::MatrixXd::Identity(p, p));
}

CovMatrix block_example_cov(int p, const Support& support, const std::vector<int>& block_sizes,
                            double mu, double eta, int aligned_block) {
  if (support.dimension() != p) {
    throw ValidationError("support dimension does not match p");
  }
  const int s = support.size();
  int total = 0;
  int max_size = 0;
  for (int r : block_sizes) {
    if (r < 1) throw ValidationError("block sizes must be positive");
    total += r;
    max_size = std::max(max_size, r);
  }
  if (total != s) throw ValidationError("block sizes must sum to the support size");
  if (max_size >= 2 && mu < -1.0 / (max_size - 1)) {
    throw ValidationError("mu below -1/(r-1) breaks positive semidefiniteness");
  }
  if (mu > 1.0 || std::abs(eta) > 1.0) {
    throw ValidationError("mu must lie in [-1/(r-1), 1] and |eta| <= 1");
  }
  if (aligned_block < 0 || aligned_block >= static_cast<int>(block_sizes.size())) {
    throw ValidationError("aligned_block out of range");
  }
  if (block_sizes[aligned_block] != max_size) {
    throw ValidationError("aligned_block must name a block of maximal size");
  }

  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
  const auto& idx = support.indices();
  int offset = 0;
  int aligned_begin = 0;
  for (int b = 0; b < static_cast<int>(block_sizes.size()); ++b) {
    if (b == aligned_block) aligned_begin = offset;
    for (int a = 0; a < block_sizes[b]; ++a) {
      for (int c = a + 1; c < block_sizes[b]; ++c) {
        m(idx[offset + a], idx[offset + c]) = mu;
        m(idx[offset + c], idx[offset + a]) = mu;
      }
    }
    offset += block_sizes[b];
  }
  for (int k : support.complement()) {
    for (int a = 0; a < max_size; ++a) {
      m(idx[aligned_begin + a], k) = eta;
      m(k, idx[aligned_begin + a]) = eta;
    }
  }
  return CovMatrix::from_entries(std::move(m));
}

CovMatrix random_unit_diag_cov(int p, std::uint64_t seed, double concentration) {
  if (p < 1) throw ValidationError("dimension must be at least 1");
  if (!(concentration > 0.0)) throw ValidationError("concentration must be positive");
  const int m_cols = std::max(2, static_cast<int>(std::ceil(p * concentration)));
  std::mt19937_64 engine(derive_seed(seed, 0x636f76));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(p, m_cols);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < m_cols; ++j) a(i, j) = gauss(engine);
  }
  Eigen::MatrixXd gram = a * a.transpose();
  Eigen::VectorXd scale = gram.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd corr(p, p);
  for (int i = 0; i < p; ++i) {
    corr(i, i) = 1.0;
    for (int j = i + 1; j < p; ++j) {
      double v = gram(i, j) * scale[i] * scale[j];
      v = std::clamp(v, -1.0, 1.0);
      corr(i, j) = v;
      corr(j, i) = v;
    }
  }
  return CovMatrix::from_entries(std::move(corr));
}

std::string format_matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out += buf;
      out += (j + 1 < m.cols()) ? "," : "\n";
    }
  }
  return out;
}

Eigen::MatrixXd read_dense_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find(',', pos);
      const std::string token =
          line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      try {
        std::size_t consumed = 0;
        const double v = std::stod(token, &consumed);
        while (consumed < token.size() &&
               std::isspace(static_cast<unsigned char>(token[consumed]))) {
          ++consumed;
        }
        if (consumed != token.size()) throw std::invalid_argument(token);
        row.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("cannot parse numeric token '" + token + "' in " + path);
      }
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty matrix file " + path);
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

CovMatrix read_matrix_csv(const std::string& path) {
  Eigen::MatrixXd m = read_dense_csv(path);
  if (m.rows() != m.cols()) {
    throw ValidationError("non-square matrix in " + path + ": " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()));
  }
  return CovMatrix::from_entries(std::move(m));
}

void write_matrix_csv(const CovMatrix& m, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ParseError("cannot open " + tmp + " for writing");
    out << format_matrix_csv(m.matrix());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace inclab
