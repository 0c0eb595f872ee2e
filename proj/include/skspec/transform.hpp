#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include "field.hpp"

namespace skspec {

/// FFTW-backed transforms between coefficient space and grid samples on the
/// uniform M x M grid x_j = 2*pi*j/M.
///
/// Conventions (matching the e_n = (2*pi)^{-1} e^{i n.x} basis):
///   forward:  fhat(n) = (2*pi / M^2) * sum_j f(x_j) e^{-i n.x_j}
///   inverse:  f(x_j)  = (2*pi)^{-1}  * sum_n fhat(n) e^{i n.x_j}
/// so inverse . forward is the identity and sum |fhat|^2 equals the grid
/// quadrature of the squared field.
class Transform {
public:
    static Transform& for_size(int m) {
        static std::mutex mu;
        static std::map<int, Transform>* registry = new std::map<int, Transform>();
        std::lock_guard<std::mutex> lock(mu);
        auto it = registry->find(m);
        if (it == registry->end()) it = registry->emplace(m, Transform(m)).first;
        return it->second;
    }

    /// coefficients -> grid samples (complex)
    void inverse(const std::vector<cplx>& coef, std::vector<cplx>& phys) const {
        phys.resize(coef.size());
        run(backward_, coef.data(), phys.data());
        const double s = 1.0 / (2.0 * M_PI);
        for (auto& v : phys) v *= s;
    }

    /// grid samples -> coefficients
    void forward(const std::vector<cplx>& phys, std::vector<cplx>& coef) const {
        coef.resize(phys.size());
        run(forward_, phys.data(), coef.data());
        const double s = 2.0 * M_PI / (double(m_) * m_);
        for (auto& v : coef) v *= s;
    }

    int size() const { return m_; }

private:
    explicit Transform(int m) : m_(m) {
        // Dummy-buffer plans with FFTW_UNALIGNED so they can execute on any
        // caller array; creation is serialized by the registry mutex.
        std::vector<cplx> a(std::size_t(m) * m), b(std::size_t(m) * m);
        forward_ = fftw_plan_dft_2d(m, m, reinterpret_cast<fftw_complex*>(a.data()),
                                    reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        backward_ = fftw_plan_dft_2d(m, m, reinterpret_cast<fftw_complex*>(a.data()),
                                     reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    void run(fftw_plan plan, const cplx* in, cplx* out) const {
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    int m_;
    fftw_plan forward_;
    fftw_plan backward_;
};

/// Grid samples of a real-tagged field; imaginary parts (symmetry-forced
/// zeros) are dropped.
inline std::vector<double> to_physical(const SpectralField& f) {
    std::vector<cplx> phys;
    Transform::for_size(f.size()).inverse(f.raw(), phys);
    std::vector<double> out(phys.size());
    for (std::size_t k = 0; k < phys.size(); ++k) out[k] = phys[k].real();
    return out;
}

inline std::vector<cplx> to_physical_complex(const SpectralField& f) {
    std::vector<cplx> phys;
    Transform::for_size(f.size()).inverse(f.raw(), phys);
    return phys;
}

inline SpectralField from_physical(const FrequencyLattice& lat, const std::vector<double>& phys,
                                   bool real_tag = true) {
    std::vector<cplx> tmp(phys.size());
    for (std::size_t k = 0; k < phys.size(); ++k) tmp[k] = cplx{phys[k], 0.0};
    SpectralField f(lat, real_tag);
    Transform::for_size(lat.size()).forward(tmp, f.raw());
    if (real_tag) {
        // grid sampling of a real function is exactly Hermitian up to rounding;
        // pin the zero mode and Nyquist rows
        f.raw()[lat.flat(0, 0)] = cplx{f.raw()[lat.flat(0, 0)].real(), 0.0};
        const int m = lat.size();
        for (int j = 0; j < m; ++j) {
            f.raw()[std::size_t(m / 2) * m + j] = cplx{0.0, 0.0};
            f.raw()[std::size_t(j) * m + m / 2] = cplx{0.0, 0.0};
        }
    }
    return f;
}

inline SpectralField from_physical_complex(const FrequencyLattice& lat, const std::vector<cplx>& phys) {
    SpectralField f(lat, false);
    Transform::for_size(lat.size()).forward(phys, f.raw());
    return f;
}

}  // namespace skspec
