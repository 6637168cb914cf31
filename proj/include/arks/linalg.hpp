#pragma once

#include "arks/linalg/dense.hpp"
#include "arks/linalg/kron.hpp"
#include "arks/linalg/qr.hpp"
#include "arks/linalg/schur.hpp"
#include "arks/linalg/svd.hpp"
#include "arks/linalg/sylvester.hpp"
#include "arks/linalg/tridiagonal.hpp"
