// Copyright 2026 The m2mt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fstream>

#include "m2mt/image_io.hpp"
#include "m2mt/tensor_io.hpp"
#include "test_support.hpp"

namespace m2mt {
namespace {

using testing::quantized_lf;
using testing::TempDir;
using namespace std::string_literals;

void write_raw(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

TEST(Pnm, EightAndSixteenBitRoundTrip) {
  TempDir dir("pnm");
  for (std::uint32_t maxval : {255u, 1023u, 65535u}) {
    Image img;
    img.width = 3;
    img.height = 2;
    img.maxval = maxval;
    img.samples = {0, 1, 7, static_cast<std::uint16_t>(maxval / 2), static_cast<std::uint16_t>(maxval - 1),
                   static_cast<std::uint16_t>(maxval)};
    write_pnm(dir / "a.pgm", img);
    const Image back = read_pnm(dir / "a.pgm");
    EXPECT_EQ(back.width, 3u);
    EXPECT_EQ(back.height, 2u);
    EXPECT_EQ(back.maxval, maxval);
    EXPECT_EQ(back.samples, img.samples);
  }
}

TEST(Pnm, SixteenBitIsBigEndian) {
  TempDir dir("pnm16");
  write_raw(dir / "b.pgm", "P5 2 1 65535\n\x01\x02\xff\x00"s);
  const Image img = read_pnm(dir / "b.pgm");
  EXPECT_EQ(img.samples, (std::vector<std::uint16_t>{0x0102, 0xff00}));
}

TEST(Pnm, HeaderCommentsAreSkipped) {
  TempDir dir("pnmc");
  write_raw(dir / "c.pgm", "P5\n# made by hand\n2 # width\n1\n255\n\x10\x20"s);
  const Image img = read_pnm(dir / "c.pgm");
  EXPECT_EQ(img.samples, (std::vector<std::uint16_t>{0x10, 0x20}));
}

TEST(Pnm, MalformedFiles) {
  TempDir dir("pnmbad");
  write_raw(dir / "magic.pgm", "P2 1 1 255\n1");
  write_raw(dir / "short.pgm", "P5 4 4 255\nab");
  write_raw(dir / "over.pgm", "P5 1 1 10\n\x0b"s);
  write_raw(dir / "zero.pgm", "P5 0 4 255\n");
  write_raw(dir / "maxval.pgm", "P5 1 1 70000\nab");
  write_raw(dir / "header.pgm", "P5 4");
  write_raw(dir / "alpha.pgm", "P5 x 4 255\n");
  for (const char* name : {"magic.pgm", "short.pgm", "over.pgm", "zero.pgm", "maxval.pgm", "header.pgm", "alpha.pgm"}) {
    EXPECT_THROW(read_pnm(dir / name), FormatError) << name;
  }
  EXPECT_THROW(read_pnm(dir / "absent.pgm"), IoError);
}

TEST(Pnm, ColorFilesReduceToLuma) {
  TempDir dir("ppm");
  Image img;
  img.width = 2;
  img.height = 1;
  img.channels = 3;
  img.maxval = 255;
  img.samples = {255, 0, 0, 255, 255, 255};
  write_pnm(dir / "c.ppm", img);
  const Tensor<double> y = read_luma(dir / "c.ppm");
  ASSERT_EQ(y.dims(), (Dims{1, 2}));
  EXPECT_NEAR(y[0], 0.299, 1e-12);
  EXPECT_NEAR(y[1], 1.0, 1e-12);
}

TEST(LightField, SaveLoadRoundTripsQuantizedValues) {
  TempDir dir("lf");
  const LfTensor<double> lf = quantized_lf<double>({3, 2, 5, 4, 1}, 9);
  save_lf(lf, dir / "lf8", 8);
  const LfTensor<double> back = load_lf<double>(dir / "lf8");
  ASSERT_EQ(back.shape(), lf.shape());
  for (std::size_t i = 0; i < lf.tensor().size(); ++i) EXPECT_NEAR(back.tensor()[i], lf.tensor()[i], 1e-15);

  save_lf(lf, dir / "lf16", 16);
  const LfTensor<float> b16 = load_lf<float>(dir / "lf16");
  for (std::size_t i = 0; i < lf.tensor().size(); ++i) EXPECT_NEAR(b16.tensor()[i], lf.tensor()[i], 1e-5);
  EXPECT_TRUE(std::filesystem::exists(dir / "lf8" / "view_u2_v1.pgm"));
  EXPECT_THROW(save_lf(lf, dir / "bad", 12), std::invalid_argument);
}

TEST(LightField, ViewsAreRowsOfY) {
  TempDir dir("lfxy");
  LfTensor<double> lf({1, 1, 3, 2, 1});
  lf(0, 0, 2, 0) = 1.0;  // x = 2, y = 0: first row, last column
  save_lf(lf, dir.path(), 8);
  const Image img = read_pnm(dir / "view_u0_v0.pgm");
  EXPECT_EQ(img.width, 3u);
  EXPECT_EQ(img.height, 2u);
  EXPECT_EQ(img.samples, (std::vector<std::uint16_t>{0, 0, 255, 0, 0, 0}));
}

TEST(LightField, GridIsInferredWithoutMeta) {
  TempDir dir("lfgrid");
  const LfTensor<double> lf = quantized_lf<double>({2, 3, 4, 4, 1}, 2);
  save_lf(lf, dir.path(), 8);
  std::filesystem::remove(dir / "meta.txt");
  EXPECT_EQ(load_lf<double>(dir.path()).shape(), lf.shape());
}

TEST(LightField, MissingAndMismatchedViews) {
  TempDir dir("lfbad");
  const LfTensor<double> lf = quantized_lf<double>({2, 2, 4, 4, 1}, 3);
  save_lf(lf, dir.path(), 8);
  std::filesystem::remove(dir / "view_u1_v0.pgm");
  try {
    load_lf<double>(dir.path());
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("missing view: "), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("view_u1_v0.pgm"), std::string::npos);
  }
  Image small;
  small.width = 3;
  small.height = 4;
  small.maxval = 255;
  small.samples.assign(12, 0);
  write_pnm(dir / "view_u1_v0.pgm", small);
  try {
    load_lf<double>(dir.path());
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("view dims mismatch"), std::string::npos);
  }
  EXPECT_THROW(load_lf<double>(dir / "nope"), IoError);
}

TEST(LightField, CentralCrop) {
  const LfShape s{9, 9, 2, 2, 1};
  LfTensor<double> lf(s);
  for (std::size_t u = 0; u < 9; ++u)
    for (std::size_t v = 0; v < 9; ++v) lf(u, v, 0, 0) = static_cast<double>(10 * u + v);
  for (std::size_t n = 2; n <= 6; ++n) {
    const LfTensor<double> c = central_views(lf, n);
    const std::size_t o = (9 - n) / 2;
    EXPECT_EQ(c.shape(), (LfShape{n, n, 2, 2, 1}));
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) EXPECT_EQ(c(u, v, 0, 0), static_cast<double>(10 * (u + o) + v + o));
  }
  EXPECT_EQ(central_views(lf, 9).tensor(), lf.tensor());
  EXPECT_THROW(central_views(lf, 10), ShapeError);
  EXPECT_THROW(central_views(lf, 0), ShapeError);
}

TEST(LightField, TensorFilesLoadToo) {
  TempDir dir("lft");
  const LfTensor<double> lf = quantized_lf<double>({3, 3, 4, 4, 1}, 4);
  write_lft(dir / "a.lft", lf.tensor());
  const LfTensor<double> back = load_lf_any<double>(dir / "a.lft", 1);
  EXPECT_EQ(back.shape(), (LfShape{1, 1, 4, 4, 1}));
  EXPECT_EQ(back(0, 0, 2, 3), lf(1, 1, 2, 3));
  write_lft(dir / "flat.lft", Tensor<double>({4, 4}));
  EXPECT_THROW(load_lf_any<double>(dir / "flat.lft"), FormatError);
}

}  // namespace
}  // namespace m2mt
