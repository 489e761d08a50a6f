#include "proxima/families.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace proxima {

Family parse_family(const std::string& name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "gamma") return Family::gamma;
    if (name == "invgauss") return Family::inverse_gaussian;
    if (name == "poisson") return Family::poisson;
    throw std::invalid_argument("unknown family: " + name);
}

Link parse_link(const std::string& name) {
    if (name == "identity") return Link::identity;
    if (name == "log") return Link::log;
    if (name == "inverse") return Link::inverse;
    if (name == "invsquare") return Link::inverse_square;
    if (name == "sqrt") return Link::sqrt;
    throw std::invalid_argument("unknown link: " + name);
}

std::string family_name(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::gamma: return "gamma";
        case Family::inverse_gaussian: return "invgauss";
        case Family::poisson: return "poisson";
    }
    return {};
}

std::string link_name(Link l) {
    switch (l) {
        case Link::identity: return "identity";
        case Link::log: return "log";
        case Link::inverse: return "inverse";
        case Link::inverse_square: return "invsquare";
        case Link::sqrt: return "sqrt";
    }
    return {};
}

double variance_function(Family f, double mu) {
    switch (f) {
        case Family::gaussian: return 1.0;
        case Family::gamma: return mu * mu;
        case Family::inverse_gaussian: return mu * mu * mu;
        case Family::poisson: return mu;
    }
    return 0.0;
}

bool mean_in_domain(Family f, double mu) {
    if (!std::isfinite(mu)) return false;
    return f == Family::gaussian ? true : mu > 0.0;
}

bool response_in_support(Family f, double y) {
    if (!std::isfinite(y)) return false;
    switch (f) {
        case Family::gaussian: return true;
        case Family::gamma:
        case Family::inverse_gaussian: return y > 0.0;
        case Family::poisson: return y >= 0.0;
    }
    return false;
}

double link_eval(Link l, double mu) {
    switch (l) {
        case Link::identity: return mu;
        case Link::log: return std::log(mu);
        case Link::inverse: return 1.0 / mu;
        case Link::inverse_square: return 1.0 / (mu * mu);
        case Link::sqrt: return std::sqrt(mu);
    }
    return 0.0;
}

double link_inverse(Link l, double eta) {
    switch (l) {
        case Link::identity:
            return eta;
        case Link::log:
            return std::exp(eta);
        case Link::inverse:
            if (eta == 0.0) throw std::runtime_error("inverse link: eta = 0 outside domain");
            return 1.0 / eta;
        case Link::inverse_square:
            if (eta <= 0.0) throw std::runtime_error("invsquare link: eta <= 0 outside domain");
            return 1.0 / std::sqrt(eta);
        case Link::sqrt:
            if (eta < 0.0) throw std::runtime_error("sqrt link: eta < 0 outside domain");
            return eta * eta;
    }
    return 0.0;
}

double link_derivative(Link l, double mu) {
    switch (l) {
        case Link::identity: return 1.0;
        case Link::log: return 1.0 / mu;
        case Link::inverse: return -1.0 / (mu * mu);
        case Link::inverse_square: return -2.0 / (mu * mu * mu);
        case Link::sqrt: return 0.5 / std::sqrt(mu);
    }
    return 0.0;
}

bool eta_in_domain(Link l, double eta) {
    if (!std::isfinite(eta)) return false;
    switch (l) {
        case Link::identity:
        case Link::log: return true;
        case Link::inverse: return eta != 0.0;
        case Link::inverse_square: return eta > 0.0;
        case Link::sqrt: return eta >= 0.0;
    }
    return false;
}

double unit_deviance(Family f, double y, double mu) {
    switch (f) {
        case Family::gaussian: {
            const double r = y - mu;
            return r * r;
        }
        case Family::gamma:
            return 2.0 * ((y - mu) / mu - std::log(y / mu));
        case Family::inverse_gaussian: {
            const double r = y - mu;
            return r * r / (mu * mu * y);
        }
        case Family::poisson: {
            const double ylogy = y > 0 ? y * std::log(y / mu) : 0.0;
            return 2.0 * (ylogy - (y - mu));
        }
    }
    return 0.0;
}

double log_likelihood(Family f, const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double phi) {
    const auto n = y.size();
    double ll = 0.0;
    switch (f) {
        case Family::gaussian:
            for (Eigen::Index i = 0; i < n; ++i) {
                const double r = y(i) - mu(i);
                ll += -0.5 * (std::log(2.0 * std::numbers::pi * phi) + r * r / phi);
            }
            break;
        case Family::gamma: {
            // shape 1/phi, scale mu*phi
            const double inv_phi = 1.0 / phi;
            for (Eigen::Index i = 0; i < n; ++i)
                ll += inv_phi * std::log(y(i) / (mu(i) * phi)) - y(i) / (mu(i) * phi) -
                      std::log(y(i)) - std::lgamma(inv_phi);
            break;
        }
        case Family::inverse_gaussian:
            for (Eigen::Index i = 0; i < n; ++i) {
                const double r = y(i) - mu(i);
                ll += -0.5 * (std::log(2.0 * std::numbers::pi * phi * y(i) * y(i) * y(i)) +
                              r * r / (phi * mu(i) * mu(i) * y(i)));
            }
            break;
        case Family::poisson:
            for (Eigen::Index i = 0; i < n; ++i)
                ll += y(i) * std::log(mu(i)) - mu(i) - std::lgamma(y(i) + 1.0);
            break;
    }
    return ll;
}

bool dispersion_known(Family f) { return f == Family::poisson; }

int extra_parameter_count(Family f) { return dispersion_known(f) ? 0 : 1; }

}  // namespace proxima
