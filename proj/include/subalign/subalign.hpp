#pragma once

// Umbrella header.

#include "subalign/classical/alignment.hpp"
#include "subalign/classical/kernels.hpp"
#include "subalign/classical/pca.hpp"
#include "subalign/classical/svm.hpp"
#include "subalign/datasets.hpp"
#include "subalign/error.hpp"
#include "subalign/harness/compare.hpp"
#include "subalign/harness/config.hpp"
#include "subalign/harness/report.hpp"
#include "subalign/harness/run.hpp"
#include "subalign/linalg.hpp"
#include "subalign/qsa/matrix_product.hpp"
#include "subalign/qsa/projection.hpp"
#include "subalign/qsa/qnn.hpp"
#include "subalign/qsa/qpca.hpp"
#include "subalign/qsa/qsvm.hpp"
#include "subalign/quantum/amplitude_estimation.hpp"
#include "subalign/quantum/density.hpp"
#include "subalign/quantum/grover.hpp"
#include "subalign/quantum/phase_estimation.hpp"
#include "subalign/quantum/swap_test.hpp"
