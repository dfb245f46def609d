#pragma once

#include "qraman/core/field_envelope.hpp"
#include "qraman/core/velocity_grid.hpp"

#include <string>
#include <vector>

namespace qraman {

enum class ProtocolStage { after_storage, after_freeze, after_reversal, after_retrieval };

std::string stage_name(ProtocolStage s);

/// Velocity-resolved Raman coherence amplitudes on the (z-slice, velocity)
/// grid, with the spatial factor exp(i ac_tag K z) of the a-c coherence
/// factored out (the a-d coherence carries no spatial factor). Amplitudes
/// are referenced at the common global instant t_ref.
///
/// Population bookkeeping: coherence lost to gamma decays stays in its
/// level (decayed_c / decayed_d); coherence shuffled out of the
/// phase-matched chain by a mismatched pi pulse is tallied in
/// orphan_c / orphan_d (squared amplitudes, per cell).
struct EnsembleState {
    int nz = 0;
    double dz = 0.0;
    VelocityGrid vgrid;
    double t_ref = 0.0;
    int ac_tag = +1; // sign s of the spatial factor exp(i s K z)
    ProtocolStage stage = ProtocolStage::after_storage;

    std::vector<cplx> sigma_ac;     // nz * nv
    std::vector<cplx> sigma_ad;     // nz * nv
    std::vector<double> orphan_c;   // nz * nv squared amplitudes
    std::vector<double> orphan_d;
    std::vector<double> decayed_c;  // nz (velocity-summed)
    std::vector<double> decayed_d;

    // bounds of d(phase)/d(Kv) across the cells of each component [s];
    // lets the solvers check that the velocity quadrature resolves every
    // sum they will take over this state. The a-d component is
    // Doppler-frozen, so its bounds shift only through pulse mixing.
    double ac_phase_min = 0.0, ac_phase_max = 0.0;
    double ad_phase_min = 0.0, ad_phase_max = 0.0;

    static EnsembleState zero(int nz, double dz, VelocityGrid grid, double t_ref);

    int nv() const { return vgrid.size(); }
    size_t idx(int iz, int jv) const { return static_cast<size_t>(iz) * nv() + jv; }

    /// Velocity- and z-summed |sigma_ac|^2 (weighted, times dz).
    double population_ac() const;
    double population_ad() const;
    double population_orphan_c() const;
    double population_orphan_d() const;
    double population_decayed_c() const;
    double population_decayed_d() const;

    double max_abs_sigma() const;

    /// Perturbative weak-signal bound max|sigma| <= 0.1.
    void check_perturbative(double bound = 0.1) const;
};

} // namespace qraman
