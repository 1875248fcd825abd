#include "cointegra/errors.hpp"
