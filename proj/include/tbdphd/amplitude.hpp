#pragma once

#include "tbdphd/frame.hpp"
#include "tbdphd/grid.hpp"
#include "tbdphd/types.hpp"

namespace tbdphd {

// Rayleigh envelope model. Noise-only cells have power sigma_n^2; cells
// illuminated by a target carry the summed power sigma_n^2 + sigma_s^2.
struct AmplitudeParams {
    AmplitudeParams(double sigma_n, double sigma_s);

    double sigma_n;
    double sigma_s;

    double noise_var() const { return sigma_n * sigma_n; }
    double signal_var() const { return sigma_n * sigma_n + sigma_s * sigma_s; }
};

// Rayleigh density of a noise-only cell amplitude. Zero for a <= 0.
double noise_pdf(double a, const AmplitudeParams& p);

// Rayleigh density of an illuminated cell amplitude. Zero for a <= 0.
double signal_pdf(double a, const AmplitudeParams& p);

// Per-cell likelihood ratio signal_pdf/noise_pdf, evaluated in closed form
// so it stays finite and strictly increasing for all a > 0. At a -> 0+ the
// ratio tends to sigma_n^2 / (sigma_n^2 + sigma_s^2), not to 0/0.
double pixel_lr(double a, const AmplitudeParams& p);
double log_pixel_lr(double a, const AmplitudeParams& p);

// Likelihood ratio of a whole frame for a target at `state`: product of
// pixel_lr over the illuminated cells. Empty illumination set (state outside
// the field of view) gives exactly 1.
double target_lr(const EchoFrame& frame, const StateVector& state,
                 const GridSpec& grid, const AmplitudeParams& p);
double log_target_lr(const EchoFrame& frame, const StateVector& state,
                     const GridSpec& grid, const AmplitudeParams& p);

// Log-likelihood of the frame under the noise-only hypothesis. Throws if any
// amplitude is non-positive or the frame size does not match the grid.
double frame_noise_loglik(const EchoFrame& frame, const GridSpec& grid,
                          const AmplitudeParams& p);

// Signal-to-noise ratio 10*log10(sigma_s^2 / sigma_n^2) in dB.
double snr_db(const AmplitudeParams& p);

}  // namespace tbdphd
