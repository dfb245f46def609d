#include "qraman/core/ensemble_state.hpp"
#include "qraman/errors.hpp"

#include <cmath>
#include <sstream>

namespace qraman {

std::string stage_name(ProtocolStage s)
{
    switch (s) {
    case ProtocolStage::after_storage: return "after_storage";
    case ProtocolStage::after_freeze: return "after_freeze";
    case ProtocolStage::after_reversal: return "after_reversal";
    case ProtocolStage::after_retrieval: return "after_retrieval";
    }
    return "unknown";
}

EnsembleState EnsembleState::zero(int nz, double dz, VelocityGrid grid, double t_ref)
{
    EnsembleState s;
    s.nz = nz;
    s.dz = dz;
    s.vgrid = std::move(grid);
    s.t_ref = t_ref;
    size_t cells = static_cast<size_t>(nz) * s.vgrid.size();
    s.sigma_ac.assign(cells, 0.0);
    s.sigma_ad.assign(cells, 0.0);
    s.orphan_c.assign(cells, 0.0);
    s.orphan_d.assign(cells, 0.0);
    s.decayed_c.assign(nz, 0.0);
    s.decayed_d.assign(nz, 0.0);
    return s;
}

namespace {

double weighted_norm(const EnsembleState& s, const std::vector<cplx>& amp)
{
    const auto& w = s.vgrid.weights();
    double tot = 0.0;
    for (int iz = 0; iz < s.nz; ++iz) {
        double row = 0.0;
        for (int j = 0; j < s.nv(); ++j)
            row += w[j] * std::norm(amp[s.idx(iz, j)]);
        tot += row;
    }
    return tot * s.dz;
}

double weighted_sum(const EnsembleState& s, const std::vector<double>& sq)
{
    const auto& w = s.vgrid.weights();
    double tot = 0.0;
    for (int iz = 0; iz < s.nz; ++iz) {
        double row = 0.0;
        for (int j = 0; j < s.nv(); ++j)
            row += w[j] * sq[s.idx(iz, j)];
        tot += row;
    }
    return tot * s.dz;
}

} // namespace

double EnsembleState::population_ac() const { return weighted_norm(*this, sigma_ac); }
double EnsembleState::population_ad() const { return weighted_norm(*this, sigma_ad); }
double EnsembleState::population_orphan_c() const { return weighted_sum(*this, orphan_c); }
double EnsembleState::population_orphan_d() const { return weighted_sum(*this, orphan_d); }

double EnsembleState::population_decayed_c() const
{
    double t = 0.0;
    for (double v : decayed_c) t += v;
    return t * dz;
}

double EnsembleState::population_decayed_d() const
{
    double t = 0.0;
    for (double v : decayed_d) t += v;
    return t * dz;
}

double EnsembleState::max_abs_sigma() const
{
    double m = 0.0;
    for (const auto& v : sigma_ac) m = std::max(m, std::abs(v));
    for (const auto& v : sigma_ad) m = std::max(m, std::abs(v));
    return m;
}

void EnsembleState::check_perturbative(double bound) const
{
    double m = max_abs_sigma();
    if (m > bound) {
        std::ostringstream os;
        os << "ensemble: perturbative weak-signal bound exceeded: max|sigma| = " << m
           << " > " << bound << " (population of level a no longer ~ 1)";
        throw ValidationError(os.str());
    }
}

} // namespace qraman
