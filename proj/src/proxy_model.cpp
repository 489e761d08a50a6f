#include "proxima/proxy_model.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "proxima/csv.hpp"

namespace proxima {

Method parse_method(const std::string& name) {
    if (name == "ols") return Method::ols;
    if (name == "glm") return Method::glm;
    if (name == "fgls") return Method::fgls;
    if (name == "gam") return Method::gam;
    if (name == "mars") return Method::mars;
    if (name == "kernel") return Method::kernel;
    throw std::invalid_argument("unknown method: " + name);
}

std::string method_name(Method m) {
    switch (m) {
        case Method::ols: return "ols";
        case Method::glm: return "glm";
        case Method::fgls: return "fgls";
        case Method::gam: return "gam";
        case Method::mars: return "mars";
        case Method::kernel: return "kernel";
    }
    return {};
}

ProxyModel::ProxyModel(OlsFit fit, int dimension)
    : method_(Method::ols), dimension_(dimension), payload_(std::move(fit)) {}
ProxyModel::ProxyModel(GlmFit fit, int dimension)
    : method_(Method::glm), dimension_(dimension), payload_(std::move(fit)) {}
ProxyModel::ProxyModel(FglsFit fit, int dimension)
    : method_(Method::fgls), dimension_(dimension), payload_(std::move(fit)) {}
ProxyModel::ProxyModel(GamFit fit, int dimension)
    : method_(Method::gam), dimension_(dimension), payload_(std::move(fit)) {}
ProxyModel::ProxyModel(MarsModel model, int dimension)
    : method_(Method::mars), dimension_(dimension), payload_(std::move(model)) {}
ProxyModel::ProxyModel(KernelBundle bundle, int dimension)
    : method_(Method::kernel), dimension_(dimension), payload_(std::move(bundle)) {}

double ProxyModel::predict(const Scenario& x) const {
    if (static_cast<int>(x.size()) != dimension_)
        throw std::invalid_argument("ProxyModel::predict: scenario dimension mismatch");
    switch (method_) {
        case Method::ols: return as_ols().predict(x);
        case Method::glm: return as_glm().predict(x);
        case Method::fgls: return as_fgls().predict(x);
        case Method::gam: return as_gam().predict(x);
        case Method::mars: return as_mars().predict(x);
        case Method::kernel: {
            const auto& kb = as_kernel();
            return predict_kernel(kb.model, *kb.data, x);
        }
    }
    throw std::logic_error("ProxyModel::predict: bad method tag");
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_term_line(std::ostream& out, const BasisTerm& t, double coeff) {
    out << "term";
    for (int e : t.exponents) out << " " << e;
    out << " " << g17(coeff) << "\n";
}

void write_monomials(std::ostream& out, const std::vector<BasisTerm>& terms,
                     const Eigen::VectorXd& coeffs) {
    out << "terms=" << terms.size() << "\n";
    for (std::size_t i = 0; i < terms.size(); ++i) write_term_line(out, terms[i], coeffs(i));
}

class ModelReader {
  public:
    explicit ModelReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw std::runtime_error("cannot open model file: " + path);
    }

    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    }

    std::string expect_key(const std::string& key) {
        std::string line;
        if (!next(line) || line.rfind(key + "=", 0) != 0)
            throw std::runtime_error(path_ + ": expected '" + key + "=...'");
        return line.substr(key.size() + 1);
    }

    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ifstream in_;
};

BasisTerm read_term_exponents(std::istringstream& ss, int dimension, const std::string& path) {
    BasisTerm t;
    t.exponents.resize(dimension);
    for (int d = 0; d < dimension; ++d)
        if (!(ss >> t.exponents[d]))
            throw std::runtime_error(path + ": truncated term line");
    return t;
}

std::pair<std::vector<BasisTerm>, Eigen::VectorXd> read_monomials(ModelReader& reader,
                                                                  int dimension) {
    const int count = std::stoi(reader.expect_key("terms"));
    std::vector<BasisTerm> terms;
    Eigen::VectorXd coeffs(count);
    for (int i = 0; i < count; ++i) {
        std::string line;
        if (!reader.next(line)) throw std::runtime_error(reader.path() + ": truncated term list");
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag != "term") throw std::runtime_error(reader.path() + ": expected term line");
        terms.push_back(read_term_exponents(ss, dimension, reader.path()));
        double c;
        if (!(ss >> c)) throw std::runtime_error(reader.path() + ": term line missing coefficient");
        coeffs(i) = c;
    }
    return {std::move(terms), std::move(coeffs)};
}

}  // namespace

void ProxyModel::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << "method=" << method_name(method_) << "\n";
    out << "D=" << dimension_ << "\n";

    switch (method_) {
        case Method::ols: {
            const auto& f = as_ols();
            write_monomials(out, f.terms, f.coefficients);
            break;
        }
        case Method::glm: {
            const auto& f = as_glm();
            out << "family=" << family_name(f.family) << "\n";
            out << "link=" << link_name(f.link) << "\n";
            write_monomials(out, f.terms, f.coefficients);
            break;
        }
        case Method::fgls: {
            const auto& f = as_fgls();
            write_monomials(out, f.terms, f.coefficients);
            out << "varterms=" << f.variance_model.terms.size() << "\n";
            for (std::size_t i = 0; i < f.variance_model.terms.size(); ++i) {
                out << "var";
                for (int e : f.variance_model.terms[i].exponents) out << " " << e;
                out << " " << g17(f.variance_model.alpha(i)) << "\n";
            }
            break;
        }
        case Method::gam: {
            const auto& f = as_gam();
            out << "family=" << family_name(f.family) << "\n";
            out << "link=" << link_name(f.link) << "\n";
            out << "intercept=" << g17(f.intercept) << "\n";
            out << "smooths=" << f.smooths.size() << "\n";
            for (const auto& s : f.smooths) {
                out << "smooth";
                for (int e : s.spec.term.exponents) out << " " << e;
                out << " J=" << s.spec.spline_count;
                out << " lambda=" << g17(s.spec.lambda);
                out << " range= " << g17(s.spec.z_min) << " " << g17(s.spec.z_max);
                out << " means=";
                for (Eigen::Index j = 0; j < s.means.size(); ++j) out << " " << g17(s.means(j));
                out << " coeffs=";
                for (Eigen::Index j = 0; j < s.coefficients.size(); ++j)
                    out << " " << g17(s.coefficients(j));
                out << " " << g17(0.0);  // the dropped identifiability column
                out << "\n";
            }
            break;
        }
        case Method::mars: {
            const auto& f = as_mars();
            out << "family=" << family_name(f.family) << "\n";
            out << "link=" << link_name(f.link) << "\n";
            out << "terms=" << f.terms.size() << "\n";
            for (std::size_t i = 0; i < f.terms.size(); ++i) {
                const auto& t = f.terms[i];
                if (t.is_intercept()) {
                    out << "intercept " << g17(f.coefficients(i)) << "\n";
                    continue;
                }
                out << "hinge";
                for (std::size_t j = 0; j < t.factors.size(); ++j) {
                    if (j) out << " *";
                    const auto& fac = t.factors[j];
                    out << " " << fac.dim + 1 << " " << g17(fac.knot) << " "
                        << (fac.positive ? "+" : "-");
                }
                out << " " << g17(f.coefficients(i)) << "\n";
            }
            break;
        }
        case Method::kernel: {
            const auto& kb = as_kernel();
            out << "mode=" << (kb.model.mode == KernelMode::local_constant ? "lc" : "ll") << "\n";
            out << "shape="
                << (kb.model.kernel.shape == KernelShape::gaussian       ? "gaussian"
                    : kb.model.kernel.shape == KernelShape::epanechnikov ? "epanechnikov"
                                                                         : "uniform")
                << "\n";
            out << "order=" << kb.model.kernel.order << "\n";
            out << "terms=" << kb.model.terms.size() << "\n";
            for (const auto& t : kb.model.terms) {
                out << "term";
                for (int e : t.exponents) out << " " << e;
                out << "\n";
            }
            out << "bandwidths=";
            for (Eigen::Index j = 0; j < kb.model.bandwidths.size(); ++j)
                out << (j ? " " : "") << g17(kb.model.bandwidths(j));
            out << "\n";
            out << "data=" << kb.model.data_path << "\n";
            break;
        }
    }
}

ProxyModel ProxyModel::read(const std::string& path) {
    ModelReader reader(path);
    const Method method = parse_method(reader.expect_key("method"));
    const int dimension = std::stoi(reader.expect_key("D"));
    if (dimension < 1) throw std::runtime_error(path + ": bad dimension");

    switch (method) {
        case Method::ols: {
            OlsFit f;
            auto [terms, coeffs] = read_monomials(reader, dimension);
            f.terms = std::move(terms);
            f.coefficients = std::move(coeffs);
            f.k = static_cast<int>(f.terms.size());
            return ProxyModel(std::move(f), dimension);
        }
        case Method::glm: {
            GlmFit f;
            f.family = parse_family(reader.expect_key("family"));
            f.link = parse_link(reader.expect_key("link"));
            auto [terms, coeffs] = read_monomials(reader, dimension);
            f.terms = std::move(terms);
            f.coefficients = std::move(coeffs);
            f.k = static_cast<int>(f.terms.size());
            return ProxyModel(std::move(f), dimension);
        }
        case Method::fgls: {
            FglsFit f;
            auto [terms, coeffs] = read_monomials(reader, dimension);
            f.terms = std::move(terms);
            f.coefficients = std::move(coeffs);
            f.k = static_cast<int>(f.terms.size());
            const int m = std::stoi(reader.expect_key("varterms"));
            f.variance_model.alpha.resize(m);
            for (int i = 0; i < m; ++i) {
                std::string line;
                if (!reader.next(line)) throw std::runtime_error(path + ": truncated var list");
                std::istringstream ss(line);
                std::string tag;
                ss >> tag;
                if (tag != "var") throw std::runtime_error(path + ": expected var line");
                f.variance_model.terms.push_back(read_term_exponents(ss, dimension, path));
                if (!(ss >> f.variance_model.alpha(i)))
                    throw std::runtime_error(path + ": var line missing alpha");
            }
            return ProxyModel(std::move(f), dimension);
        }
        case Method::gam: {
            GamFit f;
            f.family = parse_family(reader.expect_key("family"));
            f.link = parse_link(reader.expect_key("link"));
            f.intercept = std::stod(reader.expect_key("intercept"));
            const int m = std::stoi(reader.expect_key("smooths"));
            for (int i = 0; i < m; ++i) {
                std::string line;
                if (!reader.next(line)) throw std::runtime_error(path + ": truncated smooth list");
                std::istringstream ss(line);
                std::string tag;
                ss >> tag;
                if (tag != "smooth") throw std::runtime_error(path + ": expected smooth line");
                GamSmoothBlock block;
                block.spec.term = read_term_exponents(ss, dimension, path);
                auto expect_field = [&](const std::string& name) {
                    std::string field;
                    if (!(ss >> field) || field.rfind(name, 0) != 0)
                        throw std::runtime_error(path + ": expected " + name + " in smooth line");
                    return field.size() > name.size() ? field.substr(name.size()) : std::string();
                };
                block.spec.spline_count = std::stoi(expect_field("J="));
                block.spec.lambda = std::stod(expect_field("lambda="));
                expect_field("range=");
                ss >> block.spec.z_min >> block.spec.z_max;
                expect_field("means=");
                block.means.resize(block.spec.spline_count);
                for (int j = 0; j < block.spec.spline_count; ++j) ss >> block.means(j);
                expect_field("coeffs=");
                block.coefficients.resize(block.spec.spline_count - 1);
                for (int j = 0; j + 1 < block.spec.spline_count; ++j) ss >> block.coefficients(j);
                double dropped;
                if (!(ss >> dropped)) throw std::runtime_error(path + ": truncated smooth line");
                f.smooths.push_back(std::move(block));
            }
            return ProxyModel(std::move(f), dimension);
        }
        case Method::mars: {
            MarsModel f;
            f.family = parse_family(reader.expect_key("family"));
            f.link = parse_link(reader.expect_key("link"));
            const int count = std::stoi(reader.expect_key("terms"));
            f.coefficients.resize(count);
            for (int i = 0; i < count; ++i) {
                std::string line;
                if (!reader.next(line)) throw std::runtime_error(path + ": truncated term list");
                std::istringstream ss(line);
                std::string tag;
                ss >> tag;
                if (tag == "intercept") {
                    f.terms.emplace_back();
                    if (!(ss >> f.coefficients(i)))
                        throw std::runtime_error(path + ": intercept line missing coefficient");
                    continue;
                }
                if (tag != "hinge") throw std::runtime_error(path + ": expected hinge line");
                std::vector<HingeFactor> factors;
                std::string tok;
                while (true) {
                    HingeFactor fac;
                    if (!(ss >> fac.dim >> fac.knot >> tok))
                        throw std::runtime_error(path + ": truncated hinge line");
                    fac.dim -= 1;
                    fac.positive = tok == "+";
                    if (!fac.positive && tok != "-")
                        throw std::runtime_error(path + ": bad hinge sign '" + tok + "'");
                    factors.push_back(fac);
                    if (!(ss >> tok)) throw std::runtime_error(path + ": hinge line missing coefficient");
                    if (tok == "*") continue;
                    f.coefficients(i) = std::stod(tok);
                    break;
                }
                f.terms.emplace_back(std::move(factors));
            }
            return ProxyModel(std::move(f), dimension);
        }
        case Method::kernel: {
            KernelBundle kb;
            kb.model.mode = parse_kernel_mode(reader.expect_key("mode"));
            kb.model.kernel.shape = parse_kernel_shape(reader.expect_key("shape"));
            kb.model.kernel.order = std::stoi(reader.expect_key("order"));
            const int count = std::stoi(reader.expect_key("terms"));
            for (int i = 0; i < count; ++i) {
                std::string line;
                if (!reader.next(line)) throw std::runtime_error(path + ": truncated term list");
                std::istringstream ss(line);
                std::string tag;
                ss >> tag;
                if (tag != "term") throw std::runtime_error(path + ": expected term line");
                kb.model.terms.push_back(read_term_exponents(ss, dimension, path));
            }
            {
                std::istringstream ss(reader.expect_key("bandwidths"));
                kb.model.bandwidths.resize(count - 1);
                for (int j = 0; j < count - 1; ++j)
                    if (!(ss >> kb.model.bandwidths(j)))
                        throw std::runtime_error(path + ": truncated bandwidth list");
            }
            kb.model.data_path = reader.expect_key("data");
            kb.data = std::make_shared<FittingSet>(read_fitting_csv(kb.model.data_path));
            return ProxyModel(std::move(kb), dimension);
        }
    }
    throw std::logic_error("ProxyModel::read: unreachable");
}

}  // namespace proxima
