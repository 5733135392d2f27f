#pragma once

// Exceptions must not escape an OpenMP region; loops that can throw capture
// the first error and rethrow it after the join.

#include <exception>

namespace virlab {

class OmpErrorCollector {
public:
    bool armed() const { return bool(err_); }

    template <class Fn>
    void run(Fn&& fn) noexcept {
        if (err_) return;
        try {
            fn();
        } catch (...) {
#pragma omp critical(virlab_omp_error)
            if (!err_) err_ = std::current_exception();
        }
    }

    void rethrow_if_any() const {
        if (err_) std::rethrow_exception(err_);
    }

private:
    std::exception_ptr err_;
};

} // namespace virlab
