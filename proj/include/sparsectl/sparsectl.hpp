#pragma once

#include "sparsectl/construct.hpp"
#include "sparsectl/equiv.hpp"
#include "sparsectl/errors.hpp"
#include "sparsectl/gensys.hpp"
#include "sparsectl/mcp.hpp"
#include "sparsectl/numlin.hpp"
#include "sparsectl/pbh.hpp"
#include "sparsectl/sparsity.hpp"
