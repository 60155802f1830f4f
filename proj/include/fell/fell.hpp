#pragma once

#include "fell/config.hpp"
#include "fell/matrix.hpp"
#include "fell/matalg.hpp"
#include "fell/report.hpp"
#include "fell/groupoid.hpp"
#include "fell/bundle.hpp"
#include "fell/constructors.hpp"
#include "fell/convalg.hpp"
#include "fell/reps.hpp"
#include "fell/gallery.hpp"
#include "fell/io.hpp"
#include "fell/commands.hpp"
