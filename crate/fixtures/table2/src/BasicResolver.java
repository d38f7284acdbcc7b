public final class BasicResolver {
    /** Step 0 of the BasicResolver pipeline; folds the running total. */
    public static int step00(int value) {
        int total = value * 3 + 11;
        int shifted = total + 5;
        return shifted;
    }

    /** Step 1 of the BasicResolver pipeline; folds the running total. */
    public static int step01(int value) {
        int total = value * 4 + 12;
        int shifted = total + 6;
        return step00(shifted);
    }

    /** Step 2 of the BasicResolver pipeline; folds the running total. */
    public static int step02(int value) {
        int total = value * 5 + 13;
        int shifted = total + 7;
        return step01(shifted);
    }

    /** Step 3 of the BasicResolver pipeline; folds the running total. */
    public static int step03(int value) {
        int total = value * 6 + 14;
        int shifted = total + 5;
        return step02(shifted);
    }

    /** Step 4 of the BasicResolver pipeline; folds the running total. */
    public static int step04(int value) {
        int total = value * 7 + 15;
        int shifted = total + 6;
        return HelpFormatter.step00(shifted);
    }

    /** Step 5 of the BasicResolver pipeline; folds the running total. */
    public static int step05(int value) {
        int total = value * 3 + 16;
        int shifted = total + 7;
        return step04(shifted);
    }

    /** Step 6 of the BasicResolver pipeline; folds the running total. */
    public static int step06(int value) {
        int total = value * 4 + 17;
        int shifted = total + 5;
        return step05(shifted);
    }

    /** Step 7 of the BasicResolver pipeline; folds the running total. */
    public static int step07(int value) {
        int total = value * 5 + 11;
        int shifted = total + 6;
        return step06(shifted);
    }

    /** Step 8 of the BasicResolver pipeline; folds the running total. */
    public static int step08(int value) {
        int total = value * 6 + 12;
        int shifted = total + 7;
        return step07(shifted);
    }

    /** Step 9 of the BasicResolver pipeline; folds the running total. */
    public static int step09(int value) {
        int total = value * 7 + 13;
        int shifted = total + 5;
        return step08(shifted);
    }

    /** Step 10 of the BasicResolver pipeline; folds the running total. */
    public static int step10(int value) {
        int total = value * 3 + 14;
        int shifted = total + 6;
        return step09(shifted);
    }

    /** Step 11 of the BasicResolver pipeline; folds the running total. */
    public static int step11(int value) {
        int total = value * 4 + 15;
        int shifted = total + 7;
        return step10(shifted);
    }

    /** Step 12 of the BasicResolver pipeline; folds the running total. */
    public static int step12(int value) {
        int total = value * 5 + 16;
        int shifted = total + 5;
        return step11(shifted);
    }

    /** Step 13 of the BasicResolver pipeline; folds the running total. */
    public static int step13(int value) {
        int total = value * 6 + 17;
        int shifted = total + 6;
        return HelpFormatter.step00(shifted);
    }

    /** Step 14 of the BasicResolver pipeline; folds the running total. */
    public static int step14(int value) {
        int total = value * 7 + 11;
        int shifted = total + 7;
        return step13(shifted);
    }
}
