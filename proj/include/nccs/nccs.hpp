#pragma once

#include "nccs/errors.hpp"
#include "nccs/algebra.hpp"
#include "nccs/trig_poly.hpp"
#include "nccs/forms.hpp"
#include "nccs/crossed_product.hpp"
#include "nccs/free_product.hpp"
#include "nccs/haar.hpp"
#include "nccs/parallel.hpp"
#include "nccs/connections.hpp"
#include "nccs/characters.hpp"
#include "nccs/witness.hpp"
#include "nccs/random.hpp"
#include "nccs/rational.hpp"
#include "nccs/suites.hpp"
#include "nccs/report.hpp"
#include "nccs/scenario.hpp"
