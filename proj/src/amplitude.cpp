#include "tbdphd/amplitude.hpp"

#include <cmath>
#include <stdexcept>

namespace tbdphd {

AmplitudeParams::AmplitudeParams(double sn, double ss) : sigma_n(sn), sigma_s(ss) {
    if (!(sigma_n > 0.0) || !std::isfinite(sigma_n)) {
        throw std::invalid_argument("sigma_n must be positive and finite");
    }
    if (!(sigma_s >= 0.0) || !std::isfinite(sigma_s)) {
        throw std::invalid_argument("sigma_s must be nonnegative and finite");
    }
}

namespace {

inline double rayleigh_pdf(double a, double var) {
    if (a <= 0.0) return 0.0;
    return (a / var) * std::exp(-a * a / (2.0 * var));
}

}  // namespace

double noise_pdf(double a, const AmplitudeParams& p) {
    return rayleigh_pdf(a, p.noise_var());
}

double signal_pdf(double a, const AmplitudeParams& p) {
    return rayleigh_pdf(a, p.signal_var());
}

double log_pixel_lr(double a, const AmplitudeParams& p) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("amplitude must be positive and finite");
    }
    const double nv = p.noise_var();
    const double sv = p.signal_var();
    // Ratio of the Rayleigh densities in closed form: the a/var prefactors
    // partially cancel, leaving nv/sv * exp(a^2 sigma_s^2 / (2 nv sv)).
    return std::log(nv / sv) + a * a * (p.sigma_s * p.sigma_s) / (2.0 * nv * sv);
}

double pixel_lr(double a, const AmplitudeParams& p) {
    return std::exp(log_pixel_lr(a, p));
}

double log_target_lr(const EchoFrame& frame, const StateVector& state,
                     const GridSpec& grid, const AmplitudeParams& p) {
    double ll = 0.0;
    for (const PixelIndex pix : illuminated_pixels(state, grid)) {
        ll += log_pixel_lr(frame.at(grid, pix), p);
    }
    return ll;  // empty illumination set: log of the empty product
}

double target_lr(const EchoFrame& frame, const StateVector& state,
                 const GridSpec& grid, const AmplitudeParams& p) {
    return std::exp(log_target_lr(frame, state, grid, p));
}

double frame_noise_loglik(const EchoFrame& frame, const GridSpec& grid,
                          const AmplitudeParams& p) {
    if (static_cast<int>(frame.amplitudes.size()) != pixel_count(grid)) {
        throw std::invalid_argument("frame size does not match grid");
    }
    double ll = 0.0;
    const double nv = p.noise_var();
    for (double a : frame.amplitudes) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw std::invalid_argument("frame amplitude must be positive and finite");
        }
        ll += std::log(a / nv) - a * a / (2.0 * nv);
    }
    return ll;
}

double snr_db(const AmplitudeParams& p) {
    if (p.sigma_s == 0.0) {
        throw std::domain_error("SNR undefined for zero signal power");
    }
    return 10.0 * std::log10((p.sigma_s * p.sigma_s) / p.noise_var());
}

}  // namespace tbdphd
