#pragma once

#include "difl/classifier.hpp"
#include "difl/consequent_pca.hpp"
#include "difl/core.hpp"
#include "difl/experiment.hpp"
#include "difl/fuzzy_antecedent.hpp"
#include "difl/idx_io.hpp"
#include "difl/image.hpp"
#include "difl/model_io.hpp"
#include "difl/output_encoding.hpp"
#include "difl/patching.hpp"
#include "difl/pgm_io.hpp"
#include "difl/stack.hpp"
