#include "grrm/transition.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace grrm {

Transition::Transition(FiniteSpace source, FiniteSpace target, Eigen::MatrixXd kernel)
    : source_(std::move(source)), target_(std::move(target)), kernel_(std::move(kernel)) {
    if (static_cast<std::size_t>(kernel_.rows()) != source_.size() ||
        static_cast<std::size_t>(kernel_.cols()) != target_.size())
        throw std::invalid_argument("Transition: kernel shape does not match spaces");
    if (!kernel_.allFinite()) throw std::invalid_argument("Transition: non-finite kernel entry");
    if (kernel_.size() > 0 && kernel_.minCoeff() < 0.0)
        throw std::invalid_argument("Transition: negative kernel entry");
    for (Eigen::Index r = 0; r < kernel_.rows(); ++r) {
        const double sum = kernel_.row(r).sum();
        if (std::abs(sum - 1.0) > kRowSumSlack)
            throw std::invalid_argument("Transition: row " + source_.element(static_cast<std::size_t>(r)) +
                                        " does not sum to one");
        kernel_.row(r) /= sum;
    }
}

bool Transition::is_identity(double tol) const {
    if (!(source_ == target_)) return false;
    return (kernel_ - Eigen::MatrixXd::Identity(kernel_.rows(), kernel_.cols())).cwiseAbs().maxCoeff() <= tol;
}

Transition identity(const FiniteSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.size());
    return {space, space, Eigen::MatrixXd::Identity(n, n)};
}

Transition from_matrix(const FiniteSpace& source, const FiniteSpace& target, Eigen::MatrixXd kernel) {
    return {source, target, std::move(kernel)};
}

Distribution apply(const Transition& t, const Distribution& q) {
    if (!(q.space() == t.source())) throw std::invalid_argument("apply: distribution space != transition source");
    Eigen::VectorXd r = t.kernel().transpose() * q.mass();
    return {t.target(), std::move(r)};
}

Eigen::VectorXd apply_linear(const Transition& t, const Eigen::VectorXd& v) {
    if (static_cast<std::size_t>(v.size()) != t.source().size())
        throw std::invalid_argument("apply_linear: vector length != source size");
    return t.kernel().transpose() * v;
}

Transition serial(const Transition& t1, const Transition& t2) {
    if (!(t1.target() == t2.source())) throw std::invalid_argument("serial: t1.target != t2.source");
    return {t1.source(), t2.target(), t1.kernel() * t2.kernel()};
}

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

Transition parallel(const Transition& t1, const Transition& t2) {
    return {product_space(t1.source(), t2.source()), product_space(t1.target(), t2.target()),
            kron(t1.kernel(), t2.kernel())};
}

Transition parallel(std::span<const Transition> parts) {
    if (parts.empty()) throw std::invalid_argument("parallel: no transitions");
    std::vector<FiniteSpace> sources;
    std::vector<FiniteSpace> targets;
    Eigen::MatrixXd k = Eigen::MatrixXd::Ones(1, 1);
    for (const auto& t : parts) {
        sources.push_back(t.source());
        targets.push_back(t.target());
        k = kron(k, t.kernel());
    }
    return {product_space(sources), product_space(targets), std::move(k)};
}

Transition deterministic(const FiniteSpace& source, const FiniteSpace& target, std::span<const std::size_t> f) {
    if (f.size() != source.size()) throw std::invalid_argument("deterministic: map is not total");
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(source.size()),
                                              static_cast<Eigen::Index>(target.size()));
    for (std::size_t v = 0; v < f.size(); ++v) {
        if (f[v] >= target.size()) throw std::out_of_range("deterministic: image outside target");
        k(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(f[v])) = 1.0;
    }
    return {source, target, std::move(k)};
}

Transition deterministic(const FiniteSpace& source, const FiniteSpace& target,
                         const std::function<std::size_t(std::size_t)>& f) {
    std::vector<std::size_t> image(source.size());
    for (std::size_t v = 0; v < source.size(); ++v) image[v] = f(v);
    return deterministic(source, target, std::span<const std::size_t>(image));
}

Transition set_valued(const FiniteSpace& source, const FiniteSpace& target,
                      const std::vector<std::vector<std::size_t>>& f) {
    if (f.size() != source.size()) throw std::invalid_argument("set_valued: map is not total");
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(source.size()),
                                              static_cast<Eigen::Index>(target.size()));
    for (std::size_t v = 0; v < f.size(); ++v) {
        if (f[v].empty())
            throw std::invalid_argument("set_valued: empty image for '" + source.element(v) + "'");
        for (std::size_t w : f[v]) {
            if (w >= target.size()) throw std::out_of_range("set_valued: image outside target");
            k(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) = 1.0;
        }
        k.row(static_cast<Eigen::Index>(v)) /= k.row(static_cast<Eigen::Index>(v)).sum();
    }
    return {source, target, std::move(k)};
}

FiniteSpace binary_labels() {
    static const FiniteSpace labels = make_space({"-1", "+1"});
    return labels;
}

Transition label_noise(const FiniteSpace& labels, double rho_minus, double rho_plus) {
    if (labels.size() != 2) throw std::invalid_argument("label_noise: labels must be binary");
    if (!(rho_minus >= 0.0) || !(rho_plus >= 0.0) || !(rho_minus + rho_plus < 1.0))
        throw std::invalid_argument("label_noise: rates must satisfy 0 <= rho and rho- + rho+ < 1");
    Eigen::MatrixXd k(2, 2);
    k << 1.0 - rho_minus, rho_minus, rho_plus, 1.0 - rho_plus;
    return {labels, labels, std::move(k)};
}

Transition label_noise(double rho_minus, double rho_plus) {
    return label_noise(binary_labels(), rho_minus, rho_plus);
}

Transition symbol_noise(const FiniteSpace& space, double flip_prob) {
    if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw std::invalid_argument("symbol_noise: eta outside [0,1]");
    const auto n = static_cast<Eigen::Index>(space.size());
    if (n == 1) {
        if (flip_prob > 0.0) throw std::invalid_argument("symbol_noise: cannot flip a singleton alphabet");
        return identity(space);
    }
    Eigen::MatrixXd k = Eigen::MatrixXd::Constant(n, n, flip_prob / static_cast<double>(n - 1));
    k.diagonal().setConstant(1.0 - flip_prob);
    return {space, space, std::move(k)};
}

Transition projection(const FiniteSpace& space, std::span<const std::size_t> kept) {
    if (!space.factorized()) throw std::invalid_argument("projection: space is not factorized");
    if (kept.empty()) throw std::invalid_argument("projection: no factors kept");
    std::vector<FiniteSpace> factors;
    for (std::size_t k : kept) {
        if (k >= space.factor_count()) throw std::out_of_range("projection: factor index out of range");
        factors.push_back(space.factor(k));
    }
    FiniteSpace target = kept.size() == 1 ? factors.front() : product_space(factors);
    std::vector<std::size_t> image(space.size());
    std::vector<std::size_t> sub(kept.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto parts = space.decompose(i);
        for (std::size_t j = 0; j < kept.size(); ++j) sub[j] = parts[kept[j]];
        image[i] = kept.size() == 1 ? sub.front() : target.compose(sub);
    }
    return deterministic(space, target, std::span<const std::size_t>(image));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

struct KernelTable {
    std::vector<std::string> columns;
    std::vector<std::string> rows;
    std::vector<std::vector<double>> values;
};

KernelTable parse_kernel_csv(std::istream& in) {
    KernelTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (t.columns.empty()) {
            if (cells.size() < 2) throw std::invalid_argument("kernel csv: header needs target columns");
            t.columns.assign(cells.begin() + 1, cells.end());
            continue;
        }
        if (cells.size() != t.columns.size() + 1)
            throw std::invalid_argument("kernel csv: row '" + cells.front() + "' has wrong width");
        t.rows.push_back(cells.front());
        std::vector<double> row;
        for (std::size_t j = 1; j < cells.size(); ++j) {
            std::size_t used = 0;
            double v = std::stod(cells[j], &used);
            if (used != cells[j].size()) throw std::invalid_argument("kernel csv: bad number '" + cells[j] + "'");
            row.push_back(v);
        }
        t.values.push_back(std::move(row));
    }
    if (t.columns.empty() || t.rows.empty()) throw std::invalid_argument("kernel csv: empty table");
    return t;
}

}  // namespace

void write_kernel_csv(const Transition& t, std::ostream& out) {
    out << "source";
    for (const auto& w : t.target().elements()) out << ',' << quote(w);
    out << '\n';
    std::ostringstream num;
    num << std::setprecision(17);
    for (std::size_t v = 0; v < t.source().size(); ++v) {
        out << quote(t.source().element(v));
        for (Eigen::Index w = 0; w < t.kernel().cols(); ++w) {
            num.str("");
            num << t.kernel()(static_cast<Eigen::Index>(v), w);
            out << ',' << num.str();
        }
        out << '\n';
    }
}

Transition read_kernel_csv(std::istream& in, const FiniteSpace& source, const FiniteSpace& target) {
    const KernelTable t = parse_kernel_csv(in);
    if (t.columns.size() != target.size() || t.rows.size() != source.size())
        throw std::invalid_argument("kernel csv: shape does not match spaces");
    Eigen::MatrixXd k = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(source.size()),
                                                  static_cast<Eigen::Index>(target.size()),
                                                  std::numeric_limits<double>::quiet_NaN());
    std::vector<std::size_t> col(t.columns.size());
    for (std::size_t j = 0; j < t.columns.size(); ++j) col[j] = target.index_of(t.columns[j]);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto v = static_cast<Eigen::Index>(source.index_of(t.rows[r]));
        for (std::size_t j = 0; j < col.size(); ++j) k(v, static_cast<Eigen::Index>(col[j])) = t.values[r][j];
    }
    if (!k.allFinite()) throw std::invalid_argument("kernel csv: duplicate or missing rows/columns");
    return {source, target, std::move(k)};
}

Transition read_kernel_csv(std::istream& in) {
    const KernelTable t = parse_kernel_csv(in);
    FiniteSpace source = make_space(t.rows);
    FiniteSpace target = make_space(t.columns);
    Eigen::MatrixXd k(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.columns.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t j = 0; j < t.columns.size(); ++j)
            k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = t.values[r][j];
    return {std::move(source), std::move(target), std::move(k)};
}

}  // namespace grrm
