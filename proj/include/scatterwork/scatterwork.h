/*
 * scatterwork.h — C API for the scatterwork library.
 *
 * Coupled-channel 1D scattering of a structured quantum system against a
 * Gaussian particle packet, two-point-measurement energy statistics of the
 * equivalent time-dependent drive, and the bridges between the two pictures.
 *
 * Conventions:
 *   - All handles are opaque; destroy them with the matching *_free call
 *     (passing NULL is a no-op).
 *   - Functions return SW_OK on success; on failure they return a status code
 *     and sw_last_error() yields a thread-local description.
 *   - Complex matrices are passed as interleaved doubles (re, im) in row-major
 *     order: a dim x dim matrix occupies 2*dim*dim doubles.
 */

#ifndef SCATTERWORK_H
#define SCATTERWORK_H

#include <stddef.h>

#if defined(_WIN32)
#define SW_API __declspec(dllexport)
#else
#define SW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define SW_VERSION "0.1.0"

typedef enum sw_status {
    SW_OK = 0,
    SW_ERR_INVALID_ARGUMENT = 1,
    SW_ERR_VALIDATION = 2,
    SW_ERR_THRESHOLD_PROXIMITY = 3,
    SW_ERR_SINGULAR_MATCHING = 4,
    SW_ERR_NUMERICAL = 5,
    SW_ERR_DOMAIN = 6,
    SW_ERR_GRID = 7,
    SW_ERR_UNKNOWN = 99
} sw_status;

typedef struct sw_system sw_system;
typedef struct sw_density sw_density;
typedef struct sw_packet sw_packet;
typedef struct sw_potential sw_potential;
typedef struct sw_grid sw_grid;
typedef struct sw_clock sw_clock;

SW_API const char* sw_version(void);
/* Thread-local message for the most recent failure on this thread. */
SW_API const char* sw_last_error(void);

/* ------------------------------ system ---------------------------------- */

/* energies: dim ascending values; coupling: Hermitian, interleaved complex. */
SW_API sw_status sw_system_create(int dim, const double* energies, const double* coupling,
                                  double hbar, sw_system** out);
SW_API void sw_system_free(sw_system* sys);
SW_API int sw_system_dim(const sw_system* sys);
SW_API sw_status sw_system_energies(const sw_system* sys, double* out);
SW_API sw_status sw_system_max_gap(const sw_system* sys, double* out);

/* ------------------------------ states ---------------------------------- */

SW_API sw_status sw_density_thermal(const sw_system* sys, double beta, sw_density** out);
SW_API sw_status sw_density_coherent_thermal(const sw_system* sys, double beta, sw_density** out);
SW_API sw_status sw_density_create(int dim, const double* mat, sw_density** out);
SW_API sw_status sw_density_get(const sw_density* rho, double* mat_out);
SW_API void sw_density_free(sw_density* rho);

/* ------------------------------ packet ---------------------------------- */

SW_API sw_status sw_packet_create(double p0, double sigma_p, double x0, double mass, double hbar,
                                  sw_packet** out);
SW_API void sw_packet_free(sw_packet* pk);
SW_API sw_status sw_packet_info(const sw_packet* pk, double* v0, double* sigma_x,
                                double* mean_kinetic_energy, int* marginal_right_moving);

/* ----------------------------- potential -------------------------------- */

SW_API sw_status sw_potential_barrier(double v0, double a, sw_potential** out);
/* nseg consecutive segments starting at x = 0 with the given widths/values. */
SW_API sw_status sw_potential_create(int nseg, const double* widths, const double* values,
                                     sw_potential** out);
SW_API void sw_potential_free(sw_potential* pot);

/* ------------------------------- grid ----------------------------------- */

SW_API sw_status sw_grid_create(double lo, double hi, int n, const sw_system* sys_or_null,
                                sw_grid** out);
/* [E_p0 - span*sigma_E - Delta_max, E_p0 + span*sigma_E + Delta_max] */
SW_API sw_status sw_grid_for_packet(const sw_packet* pk, const sw_system* sys, int n,
                                    double span_sigmas, sw_grid** out);
SW_API int sw_grid_size(const sw_grid* grid);
SW_API sw_status sw_grid_points(const sw_grid* grid, double* out);
SW_API void sw_grid_free(sw_grid* grid);

/* ------------------------- drive / TPM statistics ------------------------ */

/* Interaction-picture unitary of a constant pulse V0 on (0, tau); u: dim^2
 * interleaved complex out. */
SW_API sw_status sw_constant_pulse_unitary(const sw_system* sys, double v0, double tau,
                                           double* u_out);
/* s(E_p): unitary induced by traversing the potential at kinetic energy ep. */
SW_API sw_status sw_semiclassical_unitary(const sw_system* sys, const sw_potential* pot,
                                          double ep, double mass, double tol, double* u_out);
/* Delta comb of the two-point-measurement scheme. Call with w/weights NULL to
 * query the atom count. */
SW_API sw_status sw_tpm_comb(const sw_system* sys, const double* u, const sw_density* rho,
                             int* natoms, double* w_out, double* weight_out);
SW_API sw_status sw_tpm_average(const sw_system* sys, const double* u, const sw_density* rho,
                                double* out);
SW_API sw_status sw_untouched_work(const sw_system* sys, const double* u, const sw_density* rho,
                                   double* out);
SW_API sw_status sw_post_tpm_state(const sw_system* sys, const double* u, const sw_density* rho,
                                   sw_density** out);

/* ----------------------------- scattering -------------------------------- */

/* Flux-normalized S-matrix at fixed total energy. blocks: (2*dim)^2 interleaved
 * complex, rows (alpha = + then -, j'), cols (beta = + then -, j), including
 * the closed-channel delta convention. open_flags: dim ints. Any output may be
 * NULL. */
SW_API sw_status sw_smatrix(const sw_system* sys, const sw_potential* pot, double mass,
                            double total_energy, double* blocks, int* open_flags,
                            double* unitarity_defect);
SW_API sw_status sw_single_channel_barrier(double kinetic_energy, double v0, double a, double mass,
                                           double hbar, double* t_re, double* t_im, double* r_re,
                                           double* r_im);
SW_API sw_status sw_transition_probability(const sw_system* sys, const sw_potential* pot,
                                           double mass, double total_energy, int j_from, int j_to,
                                           double* out);

/* ------------------------------- regime ---------------------------------- */

typedef enum sw_regime_label {
    SW_REGIME_NARROW = 0,
    SW_REGIME_BROAD = 1,
    SW_REGIME_INTERMEDIATE = 2,
    SW_REGIME_NON_SEMICLASSICAL = 3
} sw_regime_label;

typedef struct sw_regime_report {
    double right_moving;
    double narrow_energy;
    double semiclassical_potential;
    double semiclassical_action;
    double semiclassical_gap;
    double broad_energy;
    double broad_time;
    sw_regime_label overall;
} sw_regime_report;

SW_API sw_status sw_classify_regime(const sw_packet* pk, const sw_system* sys,
                                    const sw_potential* pot, sw_regime_report* out);

/* ------------------------------ collision -------------------------------- */

/* Densities are written per grid point (sw_grid_size values). norm_drift may
 * be NULL. threads <= 0 selects the hardware count; results are identical for
 * any thread count. */
SW_API sw_status sw_initial_distribution(const sw_packet* pk, const sw_grid* grid,
                                         double* density_out, double* norm_drift);
SW_API sw_status sw_final_distribution(const sw_system* sys, const sw_density* rho,
                                       const sw_packet* pk, const sw_potential* pot,
                                       const sw_grid* grid, int threads, double* density_out,
                                       double* norm_drift);
SW_API sw_status sw_narrow_limit_distribution(const sw_system* sys, const sw_density* rho,
                                              const sw_packet* pk, const sw_potential* pot,
                                              const sw_grid* grid, int threads,
                                              int allow_regime_override, double* density_out,
                                              double* norm_drift);
/* Convolution of a delta comb with the packet's kinetic-energy distribution. */
SW_API sw_status sw_convolve_comb(const sw_packet* pk, int natoms, const double* w,
                                  const double* weights, const sw_grid* grid, double* density_out,
                                  double* norm_drift);
SW_API sw_status sw_kinetic_energy_change(const sw_system* sys, const sw_density* rho,
                                          const sw_packet* pk, const sw_potential* pot,
                                          double* out);
/* (1/2) integral |f - g| dE over a shared grid. */
SW_API sw_status sw_total_variation(const sw_grid* grid, const double* f, const double* g,
                                    double* out);

/* ---------------------------- semiclassical ------------------------------ */

SW_API sw_status sw_semiclassical_defect(const sw_system* sys, const sw_potential* pot,
                                         double mass, double ep, double* amplitude_defect,
                                         double* reflection_probability);

/* ------------------------------ resource --------------------------------- */

/* Clock system A with H_A = gamma p, Gaussian on a uniform momentum grid of
 * n_points spanning p0 +/- half_width. */
SW_API sw_status sw_clock_create(double gamma, double p0, double sigma_p, double x0, double hbar,
                                 int n_points, double half_width, sw_clock** out);
SW_API void sw_clock_free(sw_clock* clk);
SW_API int sw_clock_grid_size(const sw_clock* clk);
SW_API sw_status sw_clock_grid_points(const sw_clock* clk, double* out);
/* Final momentum distribution of A after the energy-conserving unitary built
 * from V_S (dim^2 interleaved complex). */
SW_API sw_status sw_resource_final_momentum(const sw_system* sys, const sw_density* rho,
                                            const sw_clock* clk, const double* v_s,
                                            double* density_out);
/* Change of variables E_A = gamma p. */
SW_API sw_status sw_resource_energy_distribution(double gamma, int n, const double* p_grid,
                                                 const double* density_p, double* e_grid_out,
                                                 double* density_e_out);

#ifdef __cplusplus
}
#endif

#endif /* SCATTERWORK_H */
