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

#include "irsmimo/linalg.hpp"

#include <sstream>

namespace irsmimo::linalg
{
    cmat hermitian_part(const cmat &A)
    {
        return 0.5 * (A + A.adjoint());
    }

    cmat hermitian_sqrt(const cmat &A)
    {
        if (A.rows() != A.cols())
            throw std::invalid_argument("hermitian_sqrt: matrix must be square");
        if (A.size() == 0)
            return A;
        Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(A));
        rvec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    }

    bool is_hermitian_psd(const cmat &A, double rel_tol)
    {
        if (A.rows() != A.cols())
            return false;
        if (A.size() == 0)
            return true;
        double scale = A.cwiseAbs().maxCoeff();
        if (scale == 0.0)
            return true;
        if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            return false;
        Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(A), Eigen::EigenvaluesOnly);
        const rvec &ev = es.eigenvalues();
        double max_abs = ev.cwiseAbs().maxCoeff();
        return ev.minCoeff() >= -rel_tol * max_abs;
    }

    double hermitian_condition(const cmat &A)
    {
        Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(A), Eigen::EigenvaluesOnly);
        rvec ev = es.eigenvalues().cwiseAbs();
        double lo = ev.minCoeff();
        return lo > 0.0 ? ev.maxCoeff() / lo : std::numeric_limits<double>::infinity();
    }

    HpdSolver::HpdSolver(const cmat &A, const char *what) : n_(A.rows())
    {
        if (A.rows() != A.cols())
            throw std::invalid_argument(std::string(what) + " must be square");
        if (!A.allFinite())
            throw NumericalError(std::string(what) + " has non-finite entries");

        llt_.compute(A);
        if (llt_.info() == Eigen::Success)
            return;

        // Cholesky failed: fall back to a pivoted solve unless A is singular.
        double cond = hermitian_condition(A);
        if (!(cond < 1e14))
        {
            std::ostringstream msg;
            msg << what << " is numerically singular (condition number " << cond << ")";
            throw NumericalError(msg.str());
        }
        lu_.compute(A);
        use_lu_ = true;
    }

    cvec HpdSolver::solve(const cvec &b) const
    {
        return use_lu_ ? cvec(lu_.solve(b)) : cvec(llt_.solve(b));
    }

    cmat HpdSolver::solve(const cmat &B) const
    {
        return use_lu_ ? cmat(lu_.solve(B)) : cmat(llt_.solve(B));
    }
}
