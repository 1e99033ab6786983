#pragma once

#include <doctest.h>

#include "gridbesov/errors.hpp"

/// Runs fn, expecting it to throw a gb::Error; returns the code.
template <class Fn>
gb::Errc error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const gb::Error& e) {
    return e.code();
  }
  FAIL("expected a gb::Error");
  return gb::Errc::invalid_argument;
}
