#pragma once

#include "digitseq/a066364.hpp"
#include "digitseq/arith.hpp"
#include "digitseq/common.hpp"
#include "digitseq/families.hpp"
#include "digitseq/kernel.hpp"
#include "digitseq/search.hpp"
