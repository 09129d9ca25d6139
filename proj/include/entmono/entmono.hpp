#pragma once

#include "entmono/error.hpp"
#include "entmono/linalg.hpp"
#include "entmono/random.hpp"
#include "entmono/states.hpp"
#include "entmono/convex_roof.hpp"
#include "entmono/measures.hpp"
#include "entmono/monogamy.hpp"
#include "entmono/protocols.hpp"
#include "entmono/io.hpp"
