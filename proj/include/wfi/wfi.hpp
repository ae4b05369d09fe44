#pragma once

#include "wfi/bitstring.hpp"
#include "wfi/dsl.hpp"
#include "wfi/finite_tree.hpp"
#include "wfi/ideals.hpp"
#include "wfi/lazy_tree.hpp"
#include "wfi/subfamily_extraction.hpp"
#include "wfi/ordinal.hpp"
#include "wfi/rational.hpp"
#include "wfi/reductions.hpp"
#include "wfi/refuters.hpp"
#include "wfi/samples.hpp"
#include "wfi/set_shape.hpp"
#include "wfi/structured_set.hpp"
#include "wfi/submeasure.hpp"
#include "wfi/tree_expr.hpp"
#include "wfi/universal.hpp"
