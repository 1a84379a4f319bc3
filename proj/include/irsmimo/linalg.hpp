// SPDX-License-Identifier: Apache-2.0
//
// irsmimo: uplink simulator for IRS-aided multi-cell massive MIMO
// Copyright (C) 2026 The irsmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "irsmimo/common.hpp"

namespace irsmimo::linalg
{
    /// Principal Hermitian square root. Negative eigenvalues are clipped at zero.
    cmat hermitian_sqrt(const cmat &A);

    /// True when A is Hermitian and min eig >= -rel_tol * max |eig|.
    bool is_hermitian_psd(const cmat &A, double rel_tol = 1e-10);

    /// 2-norm condition number of a Hermitian matrix.
    double hermitian_condition(const cmat &A);

    cmat hermitian_part(const cmat &A);

    /// Cholesky factorization of a Hermitian positive definite matrix with a
    /// pivoted-LU fallback. Throws NumericalError (with the condition number)
    /// when both fail.
    class HpdSolver
    {
    public:
        HpdSolver() = default;
        explicit HpdSolver(const cmat &A, const char *what = "matrix");

        cvec solve(const cvec &b) const;
        cmat solve(const cmat &B) const;
        bool used_fallback() const { return use_lu_; }
        Eigen::Index size() const { return n_; }

    private:
        Eigen::LLT<cmat> llt_;
        Eigen::PartialPivLU<cmat> lu_;
        bool use_lu_ = false;
        Eigen::Index n_ = 0;
    };

    inline cvec solve_hpd(const cmat &A, const cvec &b, const char *what = "matrix")
    {
        return HpdSolver(A, what).solve(b);
    }
}
