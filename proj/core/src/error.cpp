#include "geocode/error.hpp"
