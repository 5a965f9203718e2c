#pragma once

#include "skewsds/block.hpp"
#include "skewsds/catalog.hpp"
#include "skewsds/equivalence.hpp"
#include "skewsds/hadamard.hpp"
#include "skewsds/sds.hpp"
#include "skewsds/search.hpp"
#include "skewsds/zmod.hpp"
