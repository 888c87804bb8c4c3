// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FAIRCHK_FAIRCHK_HPP
#define FAIRCHK_FAIRCHK_HPP

#include "fairchk/parser.hpp"
#include "fairchk/render.hpp"
#include "fairchk/runtime.hpp"
#include "fairchk/semantics.hpp"
#include "fairchk/subtyping.hpp"
#include "fairchk/syntax.hpp"
#include "fairchk/typecheck.hpp"
#include "fairchk/types.hpp"
#include "fairchk/weight.hpp"

#endif  // FAIRCHK_FAIRCHK_HPP
