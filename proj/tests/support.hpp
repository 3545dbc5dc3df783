#pragma once

#include <gtest/gtest.h>

#include "multiscale/error.hpp"

#define EXPECT_ERRC(stmt, errc)                                                   \
  do {                                                                            \
    try {                                                                         \
      stmt;                                                                       \
      ADD_FAILURE() << "expected " << multiscale::errc_name(errc) << ", no throw"; \
    } catch (const multiscale::Error& e) {                                        \
      EXPECT_EQ(e.code(), errc) << e.what();                                      \
    }                                                                             \
  } while (0)
