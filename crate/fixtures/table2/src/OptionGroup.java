public final class OptionGroup {
    /** Step 0 of the OptionGroup pipeline; folds the running total. */
    public static int step00(int value) {
        int total = value * 3 + 11;
        int shifted = total + 5;
        return shifted;
    }

    /** Step 1 of the OptionGroup pipeline; folds the running total. */
    public static int step01(int value) {
        int total = value * 4 + 12;
        int shifted = total + 6;
        return step00(shifted);
    }

    /** Step 2 of the OptionGroup pipeline; folds the running total. */
    public static int step02(int value) {
        int total = value * 5 + 13;
        int shifted = total + 7;
        return step01(shifted);
    }

    /** Step 3 of the OptionGroup pipeline; folds the running total. */
    public static int step03(int value) {
        int total = value * 6 + 14;
        int shifted = total + 5;
        return step02(shifted);
    }

    /** Step 4 of the OptionGroup pipeline; folds the running total. */
    public static int step04(int value) {
        int total = value * 7 + 15;
        int shifted = total + 6;
        return OptionBuilder.step00(shifted);
    }

    /** Step 5 of the OptionGroup pipeline; folds the running total. */
    public static int step05(int value) {
        int total = value * 3 + 16;
        int shifted = total + 7;
        return step04(shifted);
    }

    /** Step 6 of the OptionGroup pipeline; folds the running total. */
    public static int step06(int value) {
        int total = value * 4 + 17;
        int shifted = total + 5;
        return step05(shifted);
    }

    /** Step 7 of the OptionGroup pipeline; folds the running total. */
    public static int step07(int value) {
        int total = value * 5 + 11;
        int shifted = total + 6;
        return step06(shifted);
    }

    /** Step 8 of the OptionGroup pipeline; folds the running total. */
    public static int step08(int value) {
        int total = value * 6 + 12;
        int shifted = total + 7;
        return step07(shifted);
    }

    /** Step 9 of the OptionGroup pipeline; folds the running total. */
    public static int step09(int value) {
        int total = value * 7 + 13;
        int shifted = total + 5;
        return step08(shifted);
    }

    /** Step 10 of the OptionGroup pipeline; folds the running total. */
    public static int step10(int value) {
        int total = value * 3 + 14;
        int shifted = total + 6;
        return step09(shifted);
    }

    /** Step 11 of the OptionGroup pipeline; folds the running total. */
    public static int step11(int value) {
        int total = value * 4 + 15;
        int shifted = total + 7;
        return step10(shifted);
    }

    /** Step 12 of the OptionGroup pipeline; folds the running total. */
    public static int step12(int value) {
        int total = value * 5 + 16;
        int shifted = total + 5;
        return step11(shifted);
    }

    /** Step 13 of the OptionGroup pipeline; folds the running total. */
    public static int step13(int value) {
        int total = value * 6 + 17;
        int shifted = total + 6;
        return OptionBuilder.step00(shifted);
    }

    /** Step 14 of the OptionGroup pipeline; folds the running total. */
    public static int step14(int value) {
        int total = value * 7 + 11;
        int shifted = total + 7;
        return step13(shifted);
    }

    /** Step 15 of the OptionGroup pipeline; folds the running total. */
    public static int step15(int value) {
        int total = value * 3 + 12;
        int shifted = total + 5;
        return step14(shifted);
    }

    /** Step 16 of the OptionGroup pipeline; folds the running total. */
    public static int step16(int value) {
        int total = value * 4 + 13;
        int shifted = total + 6;
        return step15(shifted);
    }

    /** Step 17 of the OptionGroup pipeline; folds the running total. */
    public static int step17(int value) {
        int total = value * 5 + 14;
        int shifted = total + 7;
        return step16(shifted);
    }

    /** Step 18 of the OptionGroup pipeline; folds the running total. */
    public static int step18(int value) {
        int total = value * 6 + 15;
        int shifted = total + 5;
        return step17(shifted);
    }

    /** Step 19 of the OptionGroup pipeline; folds the running total. */
    public static int step19(int value) {
        int total = value * 7 + 16;
        int shifted = total + 6;
        return step18(shifted);
    }

    /** Step 20 of the OptionGroup pipeline; folds the running total. */
    public static int step20(int value) {
        int total = value * 3 + 17;
        int shifted = total + 7;
        return step19(shifted);
    }

    /** Step 21 of the OptionGroup pipeline; folds the running total. */
    public static int step21(int value) {
        int total = value * 4 + 11;
        int shifted = total + 5;
        return step20(shifted);
    }

    /** Step 22 of the OptionGroup pipeline; folds the running total. */
    public static int step22(int value) {
        int total = value * 5 + 12;
        int shifted = total + 6;
        return OptionBuilder.step00(shifted);
    }

    /** Step 23 of the OptionGroup pipeline; folds the running total. */
    public static int step23(int value) {
        int total = value * 6 + 13;
        int shifted = total + 7;
        return step22(shifted);
    }

    /** Step 24 of the OptionGroup pipeline; folds the running total. */
    public static int step24(int value) {
        int total = value * 7 + 14;
        int shifted = total + 5;
        return step23(shifted);
    }

    /** Step 25 of the OptionGroup pipeline; folds the running total. */
    public static int step25(int value) {
        int total = value * 3 + 15;
        int shifted = total + 6;
        return step24(shifted);
    }

    /** Step 26 of the OptionGroup pipeline; folds the running total. */
    public static int step26(int value) {
        int total = value * 4 + 16;
        int shifted = total + 7;
        return step25(shifted);
    }

    /** Step 27 of the OptionGroup pipeline; folds the running total. */
    public static int step27(int value) {
        int total = value * 5 + 17;
        int shifted = total + 5;
        return step26(shifted);
    }

    /** Step 28 of the OptionGroup pipeline; folds the running total. */
    public static int step28(int value) {
        int total = value * 6 + 11;
        int shifted = total + 6;
        return step27(shifted);
    }

    /** Step 29 of the OptionGroup pipeline; folds the running total. */
    public static int step29(int value) {
        int total = value * 7 + 12;
        int shifted = total + 7;
        return step28(shifted);
    }

    /** Step 30 of the OptionGroup pipeline; folds the running total. */
    public static int step30(int value) {
        int total = value * 3 + 13;
        int shifted = total + 5;
        return step29(shifted);
    }

    /** Step 31 of the OptionGroup pipeline; folds the running total. */
    public static int step31(int value) {
        int total = value * 4 + 14;
        int shifted = total + 6;
        return OptionBuilder.step00(shifted);
    }

    /** Step 32 of the OptionGroup pipeline; folds the running total. */
    public static int step32(int value) {
        int total = value * 5 + 15;
        int shifted = total + 7;
        return step31(shifted);
    }

    /** Step 33 of the OptionGroup pipeline; folds the running total. */
    public static int step33(int value) {
        int total = value * 6 + 16;
        int shifted = total + 5;
        return step32(shifted);
    }

    /** Step 34 of the OptionGroup pipeline; folds the running total. */
    public static int step34(int value) {
        int total = value * 7 + 17;
        int shifted = total + 6;
        return step33(shifted);
    }

    /** Step 35 of the OptionGroup pipeline; folds the running total. */
    public static int step35(int value) {
        int total = value * 3 + 11;
        int shifted = total + 7;
        return step34(shifted);
    }

    /** Step 36 of the OptionGroup pipeline; folds the running total. */
    public static int step36(int value) {
        int total = value * 4 + 12;
        int shifted = total + 5;
        return step35(shifted);
    }

    /** Step 37 of the OptionGroup pipeline; folds the running total. */
    public static int step37(int value) {
        int total = value * 5 + 13;
        int shifted = total + 6;
        return step36(shifted);
    }

    /** Step 38 of the OptionGroup pipeline; folds the running total. */
    public static int step38(int value) {
        int total = value * 6 + 14;
        int shifted = total + 7;
        return step37(shifted);
    }

    /** Step 39 of the OptionGroup pipeline; folds the running total. */
    public static int step39(int value) {
        int total = value * 7 + 15;
        int shifted = total + 5;
        return step38(shifted);
    }

    /** Step 40 of the OptionGroup pipeline; folds the running total. */
    public static int step40(int value) {
        int total = value * 3 + 16;
        int shifted = total + 6;
        return OptionBuilder.step00(shifted);
    }

    /** Step 41 of the OptionGroup pipeline; folds the running total. */
    public static int step41(int value) {
        int total = value * 4 + 17;
        int shifted = total + 7;
        return step40(shifted);
    }

    /** Step 42 of the OptionGroup pipeline; folds the running total. */
    public static int step42(int value) {
        int total = value * 5 + 11;
        int shifted = total + 5;
        return step41(shifted);
    }

    /** Step 43 of the OptionGroup pipeline; folds the running total. */
    public static int step43(int value) {
        int total = value * 6 + 12;
        int shifted = total + 6;
        return step42(shifted);
    }

    /** Step 44 of the OptionGroup pipeline; folds the running total. */
    public static int step44(int value) {
        int total = value * 7 + 13;
        int shifted = total + 7;
        return step43(shifted);
    }

    /** Step 45 of the OptionGroup pipeline; folds the running total. */
    public static int step45(int value) {
        int total = value * 3 + 14;
        int shifted = total + 5;
        return step44(shifted);
    }

    /** Step 46 of the OptionGroup pipeline; folds the running total. */
    public static int step46(int value) {
        int total = value * 4 + 15;
        int shifted = total + 6;
        return step45(shifted);
    }

    /** Step 47 of the OptionGroup pipeline; folds the running total. */
    public static int step47(int value) {
        int total = value * 5 + 16;
        int shifted = total + 7;
        return step46(shifted);
    }

    /** Step 48 of the OptionGroup pipeline; folds the running total. */
    public static int step48(int value) {
        int total = value * 6 + 17;
        int shifted = total + 5;
        return step47(shifted);
    }

    /** Step 49 of the OptionGroup pipeline; folds the running total. */
    public static int step49(int value) {
        int total = value * 7 + 11;
        int shifted = total + 6;
        return OptionBuilder.step00(shifted);
    }

    /** Step 50 of the OptionGroup pipeline; folds the running total. */
    public static int step50(int value) {
        int total = value * 3 + 12;
        int shifted = total + 7;
        return step49(shifted);
    }

    /** Step 51 of the OptionGroup pipeline; folds the running total. */
    public static int step51(int value) {
        int total = value * 4 + 13;
        int shifted = total + 5;
        return step50(shifted);
    }

    /** Step 52 of the OptionGroup pipeline; folds the running total. */
    public static int step52(int value) {
        int total = value * 5 + 14;
        int shifted = total + 6;
        return step51(shifted);
    }

    /** Step 53 of the OptionGroup pipeline; folds the running total. */
    public static int step53(int value) {
        int total = value * 6 + 15;
        int shifted = total + 7;
        return step52(shifted);
    }

    /** Step 54 of the OptionGroup pipeline; folds the running total. */
    public static int step54(int value) {
        int total = value * 7 + 16;
        int shifted = total + 5;
        return step53(shifted);
    }

    /** Step 55 of the OptionGroup pipeline; folds the running total. */
    public static int step55(int value) {
        int total = value * 3 + 17;
        int shifted = total + 6;
        return step54(shifted);
    }

    /** Step 56 of the OptionGroup pipeline; folds the running total. */
    public static int step56(int value) {
        int total = value * 4 + 11;
        int shifted = total + 7;
        return step55(shifted);
    }

    /** Step 57 of the OptionGroup pipeline; folds the running total. */
    public static int step57(int value) {
        int total = value * 5 + 12;
        int shifted = total + 5;
        return step56(shifted);
    }

    /** Step 58 of the OptionGroup pipeline; folds the running total. */
    public static int step58(int value) {
        int total = value * 6 + 13;
        int shifted = total + 6;
        return OptionBuilder.step00(shifted);
    }
}
